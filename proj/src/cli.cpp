#include "bandalloc/cli.hpp"

#include <yaml-cpp/yaml.h>

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "bandalloc/boundary.hpp"
#include "bandalloc/errors.hpp"
#include "bandalloc/fixedalloc.hpp"
#include "bandalloc/model.hpp"
#include "bandalloc/orthogonal.hpp"
#include "bandalloc/randalloc.hpp"
#include "bandalloc/scenario_io.hpp"
#include "bandalloc/schedule.hpp"
#include "bandalloc/sim.hpp"

namespace bandalloc::cli {

using json = nlohmann::ordered_json;

namespace {

constexpr double kAnalyticTol = 1e-9;
constexpr double kGridTol = 2e-3;

// Any failure that should end the command with a specific exit status.
struct CommandFailure : std::runtime_error {
  CommandFailure(int code, const std::string& what) : std::runtime_error(what), code(code) {}
  int code;
};

double parse_double(std::string_view text, const char* what) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v))
    throw std::invalid_argument(std::string("invalid number in ") + what + ": '" + std::string(text) + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

// Grid points are snapped to 12 significant digits so 0.1 + 2 * 0.1 reads as 0.3.
double snap(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

json to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (double v : m.row(r)) row.push_back(v);
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_yaml(const YAML::Node& node, const char* what) {
  if (!node.IsSequence() || node.size() == 0) throw ConfigError(std::string(what) + " must be a list of rows");
  std::vector<std::vector<double>> rows;
  for (const YAML::Node& r : node) {
    if (!r.IsSequence()) throw ConfigError(std::string(what) + " rows must be lists");
    rows.push_back(r.as<std::vector<double>>());
  }
  return Matrix::from_nested(rows);
}

bool looks_non_string(const std::string& s) {
  if (s.empty() || s == "~" || s == "null" || s == "true" || s == "false") return true;
  char* end = nullptr;
  std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

bool all_scalars(const json& j) {
  return std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_primitive(); });
}

void emit_yaml(YAML::Emitter& out, const json& j) {
  switch (j.type()) {
    case json::value_t::object:
      out << YAML::BeginMap;
      for (const auto& [k, v] : j.items()) {
        out << YAML::Key << k << YAML::Value;
        emit_yaml(out, v);
      }
      out << YAML::EndMap;
      break;
    case json::value_t::array:
      if (!j.empty() && all_scalars(j)) out << YAML::Flow;
      out << YAML::BeginSeq;
      for (const json& e : j) emit_yaml(out, e);
      out << YAML::EndSeq;
      break;
    case json::value_t::string: {
      const auto& s = j.get_ref<const std::string&>();
      if (looks_non_string(s)) {
        out << YAML::DoubleQuoted << s;
      } else {
        out << s;
      }
      break;
    }
    case json::value_t::number_float:
      out << io::format_number(j.get<double>());
      break;
    case json::value_t::number_integer:
      out << std::to_string(j.get<std::int64_t>());
      break;
    case json::value_t::number_unsigned:
      out << std::to_string(j.get<std::uint64_t>());
      break;
    case json::value_t::boolean:
      out << (j.get<bool>() ? "true" : "false");
      break;
    default:
      out << YAML::Null;
  }
}

std::string cell(double v) { return io::format_number(v); }

// Options shared by all subcommands; each subcommand binds the ones it takes.
struct Options {
  std::string scenario;
  std::string system;
  std::size_t axis = 0;
  std::string grid;
  std::string fixed;
  std::string omega;
  std::string policy;
  std::string trace;
  std::uint64_t slots = 100000;
  std::optional<std::uint64_t> warmup;
  std::uint64_t stride = 100;
  std::uint64_t seed = 0;
  bool json_out = false;
  std::string out_file;
};

struct Context {
  Scenario scenario;
  RateMatrix rates;
  std::string digest;

  std::size_t users() const { return rates.num_users(); }
  std::size_t bands() const { return rates.num_bands(); }
};

Context load(const Options& o) {
  Context c;
  c.scenario = io::load_scenario(o.scenario);
  c.rates = rate_matrix(c.scenario);
  c.digest = io::scenario_digest(c.scenario);
  return c;
}

json provenance(const Context& c) {
  return json{{"scenario_digest", c.digest}, {"tool_version", kVersion}};
}

std::string render_single(const json& doc, bool as_json) {
  if (as_json) return doc.dump(2) + "\n";
  YAML::Emitter e;
  emit_yaml(e, doc);
  return std::string(e.c_str()) + "\n";
}

std::size_t user_index(std::size_t one_based, std::size_t users, const char* flag) {
  if (one_based < 1 || one_based > users)
    throw std::invalid_argument(std::string(flag) + " must name a user in 1.." + std::to_string(users));
  return one_based - 1;
}

const char* system_tag(const std::string& s) {
  if (s == "S") return "S";
  if (s == "S_hat") return "S_hat";
  return "S_fixed_best";
}

struct Value {
  Status status = Status::infeasible;
  double value = 0.0;
  bool ok() const { return status == Status::ok; }
};

Value from_envelope(const orthogonal::EnvelopePoint& p) { return {p.status, p.max_rate}; }

void require_random_scope(const Matrix& mu) {
  if (mu.cols() != 2 || mu.rows() > 2) throw UnsupportedError("analytic envelope unsupported; use simulate");
}

// Random-selection envelope for two users and at most two bands. A network with
// a single usable band gets the closed form.
Value s_hat_value(const Matrix& mu, std::size_t axis, std::size_t free, double x) {
  require_random_scope(mu);
  std::vector<std::size_t> usable;
  for (std::size_t j = 0; j < mu.rows(); ++j)
    if (mu(j, 0) > 0.0 || mu(j, 1) > 0.0) usable.push_back(j);
  if (usable.size() <= 1) {
    const std::size_t b = usable.empty() ? 0 : usable.front();
    const auto v = randalloc::one_band_boundary(mu(b, free), mu(b, axis), x);
    if (!v) return {};
    return {Status::ok, *v};
  }
  const randalloc::DominantEnvelopePoint p = randalloc::union_envelope_2x2(mu, axis, x);
  return {p.status, p.max_lambda};
}

std::string mapping_label(const fixedalloc::FixedMapping& m) {
  std::string s = "fixed_d";
  for (std::size_t b : m.band_of_user) s += std::to_string(b + 1);
  return s;
}

void put_value(json& j, const Value& v) {
  if (v.ok()) {
    j = v.value;
  } else {
    j = nullptr;
  }
}

// --- rates -------------------------------------------------------------------

std::string cmd_rates(const Options& o) {
  const Context c = load(o);
  json doc;
  doc["provenance"] = provenance(c);
  doc["bands"] = c.bands();
  doc["users"] = c.users();
  doc["mu"] = to_json(c.rates.mu);
  doc["su_success"] = to_json(c.rates.su_success);
  doc["mu_p"] = c.rates.mu_p;
  doc["lambda_p"] = c.rates.lambda_p;
  doc["pi"] = c.rates.pi;
  return render_single(doc, o.json_out);
}

// --- envelope ----------------------------------------------------------------

struct Sweep {
  std::size_t axis = 0;
  std::size_t free = 0;
  std::vector<double> profile;
  std::map<std::size_t, double> fixed;
  std::vector<double> grid;
};

Sweep make_sweep(const Options& o, const Context& c) {
  Sweep s;
  const std::size_t users = c.users();
  if (users < 2) throw std::invalid_argument("a sweep needs at least two users");
  s.axis = user_index(o.axis, users, "--axis");
  s.fixed = parse_fixed(o.fixed, users);
  if (s.fixed.count(s.axis)) throw std::invalid_argument("--fixed must not set the axis user");
  std::vector<std::size_t> open;
  for (std::size_t k = 0; k < users; ++k)
    if (k != s.axis && !s.fixed.count(k)) open.push_back(k);
  if (open.size() != 1)
    throw std::invalid_argument("--fixed must set every user except the axis user and one free user");
  s.free = open.front();
  s.profile.assign(users, 0.0);
  for (const auto& [k, v] : s.fixed) s.profile[k] = v;
  s.grid = parse_grid(o.grid);
  return s;
}

void write_csv_header(std::ostream& out, const Context& c, const Sweep& s, const std::string& system) {
  out << "# scenario_digest: " << c.digest << '\n';
  out << "# tool_version: " << kVersion << '\n';
  out << "# system: " << system << '\n';
  out << "# axis_user: " << s.axis + 1 << '\n';
  out << "# free_user: " << s.free + 1 << '\n';
  for (const auto& [k, v] : s.fixed) out << "# fixed: lambda_s" << k + 1 << '=' << cell(v) << '\n';
}

json sweep_json(const Context& c, const Sweep& s) {
  json doc;
  doc["provenance"] = provenance(c);
  doc["axis_user"] = s.axis + 1;
  doc["free_user"] = s.free + 1;
  json fixed = json::object();
  for (const auto& [k, v] : s.fixed) fixed["lambda_s" + std::to_string(k + 1)] = v;
  doc["fixed_rates"] = fixed;
  doc["grid"] = s.grid;
  return doc;
}

std::string cmd_envelope(const Options& o) {
  const Context c = load(o);
  const Sweep s = make_sweep(o, c);
  const Matrix& mu = c.rates.mu;
  if (o.system == "S_hat") require_random_scope(mu);

  std::vector<Value> values;
  std::vector<double> lambdas = s.profile;
  for (double x : s.grid) {
    lambdas[s.axis] = x;
    if (o.system == "S") {
      values.push_back(from_envelope(orthogonal::envelope_point(mu, lambdas, s.free)));
    } else if (o.system == "S_hat") {
      values.push_back(s_hat_value(mu, s.axis, s.free, x));
    } else {
      const fixedalloc::FixedMax f = fixedalloc::best_fixed_max(mu, lambdas, s.free);
      values.push_back({f.status, f.max_rate});
    }
  }

  const std::string tag = system_tag(o.system);
  if (o.json_out) {
    json doc = sweep_json(c, s);
    doc["system"] = tag;
    json vals = json::array(), status = json::array();
    for (const Value& v : values) {
      put_value(vals.emplace_back(), v);
      status.push_back(to_string(v.status));
    }
    doc["values"] = vals;
    doc["status"] = status;
    return doc.dump(2) + "\n";
  }

  std::ostringstream out;
  write_csv_header(out, c, s, tag);
  out << "lambda_s" << s.axis + 1 << ",lambda_s" << s.free + 1 << "_max,status\n";
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    out << cell(s.grid[i]) << ',' << (values[i].ok() ? cell(values[i].value) : "") << ','
        << to_string(values[i].status) << '\n';
  }
  return out.str();
}

// --- compare -----------------------------------------------------------------

std::string cmd_compare(const Options& o, int& code) {
  const Context c = load(o);
  const Matrix& mu = c.rates.mu;
  if (c.users() != 2 || c.bands() != 2) throw UnsupportedError("compare needs a 2x2 scenario");
  const Sweep s = make_sweep(o, c);
  const std::vector<fixedalloc::FixedMapping> maps = fixedalloc::all_mappings(2, 2);

  struct Row {
    Value S, S_hat, best;
    std::vector<Value> per_map;
    bool contained = true;
  };
  std::vector<Row> rows;
  bool violated = false;
  std::vector<double> lambdas = s.profile;
  for (double x : s.grid) {
    lambdas[s.axis] = x;
    Row r;
    r.S = from_envelope(orthogonal::envelope_point(mu, lambdas, s.free));
    r.S_hat = s_hat_value(mu, s.axis, s.free, x);
    const fixedalloc::FixedMax b = fixedalloc::best_fixed_max(mu, lambdas, s.free);
    r.best = {b.status, b.max_rate};
    for (const auto& m : maps) {
      const fixedalloc::FixedMax f = fixedalloc::mapping_max(m, mu, lambdas, s.free);
      r.per_map.push_back({f.status, f.max_rate});
    }
    // fixed <= S_hat <= S, with the grid tolerance where the random envelope enters.
    auto below = [](const Value& lo, const Value& hi, double tol) {
      if (!lo.ok()) return true;
      return hi.ok() && lo.value <= hi.value + tol;
    };
    r.contained = below(r.S_hat, r.S, kAnalyticTol) && below(r.best, r.S_hat, kGridTol) &&
                  below(r.best, r.S, kAnalyticTol);
    violated = violated || !r.contained;
    rows.push_back(std::move(r));
  }

  std::string text;
  if (o.json_out) {
    json doc = sweep_json(c, s);
    json systems;
    auto column = [&](auto pick) {
      json vals = json::array();
      for (const Row& r : rows) put_value(vals.emplace_back(), pick(r));
      return vals;
    };
    systems["S"] = column([](const Row& r) { return r.S; });
    systems["S_hat"] = column([](const Row& r) { return r.S_hat; });
    systems["S_fixed_best"] = column([](const Row& r) { return r.best; });
    for (std::size_t m = 0; m < maps.size(); ++m)
      systems[mapping_label(maps[m])] = column([m](const Row& r) { return r.per_map[m]; });
    doc["systems"] = systems;
    json contained = json::array();
    for (const Row& r : rows) contained.push_back(r.contained);
    doc["containment"] = contained;
    doc["containment_ok"] = !violated;
    text = doc.dump(2) + "\n";
  } else {
    std::ostringstream out;
    write_csv_header(out, c, s, "compare");
    out << "lambda_s" << s.axis + 1 << ",S,S_hat,S_fixed_best";
    for (const auto& m : maps) out << ',' << mapping_label(m);
    out << ",containment\n";
    auto put = [&](const Value& v) { out << ',' << (v.ok() ? cell(v.value) : ""); };
    for (std::size_t i = 0; i < rows.size(); ++i) {
      out << cell(s.grid[i]);
      put(rows[i].S);
      put(rows[i].S_hat);
      put(rows[i].best);
      for (const Value& v : rows[i].per_map) put(v);
      out << ',' << (rows[i].contained ? "ok" : "violation") << '\n';
    }
    text = out.str();
  }
  if (violated) code = kExitContainment;
  return text;
}

// --- decompose ---------------------------------------------------------------

json schedule_json(const schedule::PermutationSchedule& sched) {
  json entries = json::array();
  for (const schedule::Entry& e : sched.entries) {
    json perm = json::array();
    for (std::size_t row : e.band_of_user) perm.push_back(row + 1);
    entries.push_back(json{{"permutation", perm}, {"weight", e.weight}});
  }
  return entries;
}

std::string cmd_decompose(const Options& o) {
  const Context c = load(o);
  json doc;
  doc["provenance"] = provenance(c);
  doc["policy"] = "orthogonal";

  Matrix omega;
  if (!o.omega.empty()) {
    omega = parse_matrix(o.omega);
    if (omega.rows() != c.bands() || omega.cols() != c.users())
      throw DimensionError("--omega must be M_p x M_s");
  } else {
    const std::size_t k = user_index(o.axis, c.users(), "--axis");
    std::vector<double> lambdas;
    for (const SecondaryUser& u : c.scenario.users) lambdas.push_back(u.arrival_rate);
    for (const auto& [l, v] : parse_fixed(o.fixed, c.users())) lambdas[l] = v;
    const orthogonal::EnvelopePoint p = orthogonal::envelope_point(c.rates, lambdas, k);
    if (p.status == Status::infeasible)
      throw CommandFailure(kExitInfeasible, "infeasible: the fixed rates lie outside the orthogonal region");
    if (p.status != Status::ok) throw std::runtime_error("LP solver failure");
    omega = p.omega_star;
    doc["free_user"] = k + 1;
    doc["max_rate"] = p.max_rate;
  }

  const schedule::Padded padded = schedule::pad_to_doubly_stochastic(omega);
  const schedule::PermutationSchedule sched = schedule::birkhoff_decompose(padded);
  doc["omega"] = to_json(omega);
  doc["padded"] = to_json(padded.matrix);
  doc["schedule"] = schedule_json(sched);
  return render_single(doc, o.json_out);
}

// --- simulate ----------------------------------------------------------------

schedule::PermutationSchedule schedule_from_yaml(const YAML::Node& node, const Context& c) {
  if (!node.IsSequence() || node.size() == 0) throw ConfigError("schedule must be a nonempty list");
  schedule::PermutationSchedule s;
  s.bands = c.bands();
  s.users = c.users();
  for (const YAML::Node& e : node) {
    const auto perm = e["permutation"].as<std::vector<std::size_t>>();
    if (s.n == 0) s.n = perm.size();
    if (perm.size() != s.n || s.n < std::max(s.bands, s.users))
      throw ConfigError("schedule permutations have inconsistent or too small size");
    schedule::Entry entry;
    std::vector<bool> seen(s.n, false);
    for (std::size_t row : perm) {
      if (row < 1 || row > s.n || seen[row - 1]) throw ConfigError("schedule entry is not a permutation");
      seen[row - 1] = true;
      entry.band_of_user.push_back(row - 1);
    }
    entry.weight = e["weight"].as<double>();
    if (!(entry.weight >= 0.0)) throw ConfigError("schedule weights must be nonnegative");
    s.entries.push_back(std::move(entry));
  }
  return s;
}

sim::Policy load_policy(const std::string& path, const Context& c) {
  YAML::Node doc;
  try {
    doc = YAML::LoadFile(path);
  } catch (const YAML::Exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  try {
    std::string kind = doc["policy"] ? doc["policy"].as<std::string>() : "";
    if (kind.empty() && doc["schedule"]) kind = "orthogonal";
    if (kind == "orthogonal") {
      if (doc["schedule"]) return sim::OrthogonalPolicy{schedule_from_yaml(doc["schedule"], c)};
      if (doc["omega"]) return sim::OrthogonalPolicy{schedule::schedule_for(matrix_from_yaml(doc["omega"], "omega"))};
      throw ConfigError("orthogonal policy needs schedule or omega");
    }
    if (kind == "random") return sim::RandomPolicy{matrix_from_yaml(doc["gamma"], "gamma")};
    if (kind == "fixed") {
      fixedalloc::FixedMapping m;
      for (std::size_t b : doc["mapping"].as<std::vector<std::size_t>>()) {
        if (b < 1) throw ConfigError("mapping bands are 1-based");
        m.band_of_user.push_back(b - 1);
      }
      return sim::FixedPolicy{m};
    }
    throw ConfigError("policy must be orthogonal, random or fixed");
  } catch (const YAML::Exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

json policy_json(const sim::Policy& p) {
  json j;
  j["kind"] = sim::policy_name(p);
  if (const auto* o = std::get_if<sim::OrthogonalPolicy>(&p)) {
    j["omega"] = to_json(o->schedule.marginals());
    j["permutations"] = o->schedule.entries.size();
  } else if (const auto* r = std::get_if<sim::RandomPolicy>(&p)) {
    j["gamma"] = to_json(r->gamma);
  } else if (const auto* f = std::get_if<sim::FixedPolicy>(&p)) {
    json m = json::array();
    for (std::size_t b : f->mapping.band_of_user) m.push_back(b + 1);
    j["mapping"] = m;
  }
  return j;
}

std::string cmd_simulate(const Options& o) {
  const Context c = load(o);
  std::vector<double> lambda_s;
  for (const SecondaryUser& u : c.scenario.users) lambda_s.push_back(u.arrival_rate);

  json doc;
  doc["provenance"] = provenance(c);
  doc["provenance"]["seed"] = o.seed;

  sim::Policy policy;
  if (!o.policy.empty()) {
    policy = load_policy(o.policy, c);
  } else {
    std::vector<double> dir = lambda_s;
    if (std::all_of(dir.begin(), dir.end(), [](double v) { return v == 0.0; })) dir.assign(dir.size(), 1.0);
    boundary::RayPoint ray;
    if (o.system == "S") {
      ray = boundary::orthogonal_ray(c.rates.mu, dir);
    } else if (o.system == "S_hat") {
      require_random_scope(c.rates.mu);
      ray = boundary::random_ray(c.rates.mu, dir);
    } else {
      ray = boundary::fixed_ray(c.rates.mu, dir);
    }
    if (ray.status != Status::ok) throw std::runtime_error("no boundary policy along the arrival-rate direction");
    policy = ray.policy;
    doc["boundary_scale"] = ray.t;
  }

  sim::SimConfig cfg;
  cfg.n_slots = o.slots;
  cfg.warmup = o.warmup.value_or(o.slots / 10);
  cfg.trace_stride = o.stride;
  cfg.seed = o.seed;
  const sim::SimResult r = sim::run(c.rates, lambda_s, policy, cfg);

  if (!o.trace.empty()) {
    std::ofstream t(o.trace);
    if (!t) throw std::runtime_error("cannot write " + o.trace);
    sim::write_trace_csv(t, r);
  }

  doc["policy"] = policy_json(policy);
  doc["slots"] = cfg.n_slots;
  doc["warmup"] = cfg.warmup;
  doc["trace_stride"] = cfg.trace_stride;
  const std::vector<double> thr = sim::empirical_throughput(r);
  const std::vector<double> avail = sim::empirical_availability(r);
  json su = json::array();
  for (std::size_t k = 0; k < r.secondary.size(); ++k) {
    const sim::QueueStats& q = r.secondary[k];
    su.push_back(json{{"user", k + 1},
                      {"arrival_rate", lambda_s[k]},
                      {"arrivals", q.arrivals},
                      {"departures", q.departures},
                      {"final_length", q.final_length},
                      {"throughput", thr[k]},
                      {"collisions", r.collisions[k]},
                      {"verdict", sim::to_string(r.secondary_verdicts[k])}});
  }
  json pu = json::array();
  for (std::size_t j = 0; j < r.primary.size(); ++j) {
    const sim::QueueStats& q = r.primary[j];
    pu.push_back(json{{"band", j + 1},
                      {"arrivals", q.arrivals},
                      {"departures", q.departures},
                      {"final_length", q.final_length},
                      {"availability", avail[j]},
                      {"verdict", sim::to_string(r.primary_verdicts[j])}});
  }
  doc["secondary"] = su;
  doc["primary"] = pu;
  return render_single(doc, o.json_out);
}

}  // namespace

std::vector<double> parse_grid(const std::string& spec) {
  if (spec.empty()) throw std::invalid_argument("--grid is empty");
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    const std::vector<std::string> parts = split(spec, ':');
    if (parts.size() != 3) throw std::invalid_argument("--grid range must be start:stop:step");
    const double start = parse_double(parts[0], "--grid");
    const double stop = parse_double(parts[1], "--grid");
    const double step = parse_double(parts[2], "--grid");
    if (!(step > 0.0) || stop < start) throw std::invalid_argument("--grid needs step > 0 and stop >= start");
    const double span = (stop - start) / step;
    if (span > 1e7) throw std::invalid_argument("--grid has too many points");
    const auto count = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) out.push_back(snap(start + static_cast<double>(i) * step));
  } else {
    for (const std::string& p : split(spec, ',')) out.push_back(parse_double(p, "--grid"));
  }
  for (double v : out)
    if (v < 0.0) throw std::invalid_argument("--grid values must be nonnegative");
  return out;
}

std::map<std::size_t, double> parse_fixed(const std::string& spec, std::size_t users) {
  std::map<std::size_t, double> out;
  if (spec.empty()) return out;
  for (const std::string& item : split(spec, ',')) {
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--fixed entries must be k=rate");
    const double k = parse_double(std::string_view(item).substr(0, eq), "--fixed");
    const double v = parse_double(std::string_view(item).substr(eq + 1), "--fixed");
    if (k != std::floor(k) || k < 1 || k > static_cast<double>(users))
      throw std::invalid_argument("--fixed user must be in 1.." + std::to_string(users));
    if (v < 0.0) throw std::invalid_argument("--fixed rates must be nonnegative");
    if (!out.emplace(static_cast<std::size_t>(k) - 1, v).second)
      throw std::invalid_argument("--fixed sets a user twice");
  }
  return out;
}

Matrix parse_matrix(const std::string& spec) {
  std::vector<std::vector<double>> rows;
  for (const std::string& r : split(spec, ';')) {
    std::vector<double> row;
    for (const std::string& v : split(r, ',')) row.push_back(parse_double(v, "matrix"));
    rows.push_back(std::move(row));
  }
  return Matrix::from_nested(rows);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stability regions of cognitive-radio band allocation systems", "bandalloc"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Options o;
  const std::vector<std::string> systems{"S", "S_hat", "fixed"};

  auto common = [&](CLI::App* sub) {
    sub->add_option("--scenario", o.scenario, "scenario YAML file")->required()->check(CLI::ExistingFile);
    sub->add_flag("--json", o.json_out, "emit one JSON document");
    sub->add_option("--out", o.out_file, "write the result to a file");
  };

  CLI::App* rates = app.add_subcommand("rates", "print the rate matrix and band availabilities");
  common(rates);

  CLI::App* envelope = app.add_subcommand("envelope", "stability-region envelope along one axis");
  common(envelope);
  envelope->add_option("--system", o.system)->required()->check(CLI::IsMember(systems));
  envelope->add_option("--axis", o.axis, "swept user (1-based)")->required();
  envelope->add_option("--grid", o.grid, "start:stop:step or a comma list")->required();
  envelope->add_option("--fixed", o.fixed, "k=rate,... for users held fixed");

  CLI::App* compare = app.add_subcommand("compare", "S, S_hat and fixed envelopes side by side");
  common(compare);
  compare->add_option("--axis", o.axis, "swept user (1-based)")->required();
  compare->add_option("--grid", o.grid, "start:stop:step or a comma list")->required();
  compare->add_option("--fixed", o.fixed, "k=rate,... for users held fixed");

  CLI::App* decompose = app.add_subcommand("decompose", "permutation schedule for an envelope point");
  common(decompose);
  decompose->add_option("--axis", o.axis, "user whose rate is maximized (1-based)");
  decompose->add_option("--fixed", o.fixed, "k=rate,... overriding scenario arrival rates");
  decompose->add_option("--omega", o.omega, "explicit assignment matrix, rows ';' entries ','");

  CLI::App* simulate = app.add_subcommand("simulate", "slot-level queue simulation");
  common(simulate);
  auto* pol = simulate->add_option("--policy", o.policy, "policy YAML file")->check(CLI::ExistingFile);
  auto* sys = simulate->add_option("--system", o.system, "derive the boundary policy of a system")
                  ->check(CLI::IsMember(systems));
  pol->excludes(sys);
  simulate->add_option("--slots", o.slots, "number of slots")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", o.seed, "RNG seed")->required();
  simulate->add_option("--warmup", o.warmup, "slots excluded from the verdict (default slots/10)");
  simulate->add_option("--stride", o.stride, "trace sampling stride")->check(CLI::PositiveNumber);
  simulate->add_option("--trace", o.trace, "write the queue trace as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  int status = kExitOk;
  std::string text;
  try {
    if (*rates) {
      text = cmd_rates(o);
    } else if (*envelope) {
      text = cmd_envelope(o);
    } else if (*compare) {
      text = cmd_compare(o, status);
    } else if (*decompose) {
      if (o.omega.empty() && o.axis == 0) throw std::invalid_argument("decompose needs --axis or --omega");
      text = cmd_decompose(o);
    } else if (*simulate) {
      if (o.policy.empty() && o.system.empty()) throw std::invalid_argument("simulate needs --policy or --system");
      text = cmd_simulate(o);
    }
  } catch (const CommandFailure& e) {
    err << "error: " << e.what() << '\n';
    return e.code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }

  if (o.out_file.empty()) {
    out << text;
  } else {
    std::ofstream f(o.out_file);
    if (!(f << text)) {
      err << "error: cannot write " << o.out_file << '\n';
      return kExitError;
    }
  }
  if (status == kExitContainment) err << "error: containment ordering violated\n";
  return status;
}

}  // namespace bandalloc::cli
