#include "bandalloc/scenario_io.hpp"

#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "bandalloc/errors.hpp"

namespace bandalloc::io {
namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& msg) const {
    const YAML::Mark mark = node.Mark();
    std::string where = source_;
    if (mark.line >= 0) where += ":" + std::to_string(mark.line + 1);
    throw ConfigError(where + ": " + msg);
  }

  void require_map(const YAML::Node& node, const std::string& what,
                   const std::set<std::string>& allowed) const {
    if (!node.IsMap()) fail(node, what + " must be a mapping");
    for (const auto& kv : node) {
      const std::string key = kv.first.as<std::string>();
      if (!allowed.count(key)) fail(kv.first, "unknown field '" + key + "' in " + what);
    }
  }

  double number(const YAML::Node& node, const std::string& what) const {
    if (!node.IsScalar()) fail(node, what + " must be a number");
    try {
      return node.as<double>();
    } catch (const YAML::Exception&) {
      fail(node, what + " must be a number, got '" + node.Scalar() + "'");
    }
  }

  std::optional<double> optional_number(const YAML::Node& map, const std::string& key,
                                        const std::string& what) const {
    const YAML::Node n = map[key];
    if (!n) return std::nullopt;
    return number(n, what + "." + key);
  }

  const std::string& source() const { return source_; }

 private:
  std::string source_;
};

SlotConfig read_slot(const Reader& r, const YAML::Node& node) {
  r.require_map(node, "slot", {"T", "tau", "b"});
  SlotConfig slot;
  if (auto v = r.optional_number(node, "T", "slot")) slot.T = *v;
  if (auto v = r.optional_number(node, "tau", "slot")) slot.tau = *v;
  if (auto v = r.optional_number(node, "b", "slot")) slot.b = *v;
  return slot;
}

PrimaryBand read_band(const Reader& r, const YAML::Node& node, InputMode mode, std::size_t idx) {
  const std::string what = "bands[" + std::to_string(idx + 1) + "]";
  PrimaryBand band;
  if (mode == InputMode::physical) {
    r.require_map(node, what, {"bandwidth", "arrival_rate", "gamma", "sigma2"});
    for (const char* key : {"bandwidth", "arrival_rate", "gamma", "sigma2"})
      if (!node[key]) r.fail(node, what + ": missing required field '" + key + "'");
    band.bandwidth_hz = r.number(node["bandwidth"], what + ".bandwidth");
    band.arrival_rate = r.number(node["arrival_rate"], what + ".arrival_rate");
    band.link = LinkParams{r.number(node["gamma"], what + ".gamma"),
                           r.number(node["sigma2"], what + ".sigma2")};
  } else {
    r.require_map(node, what, {"bandwidth", "arrival_rate", "availability", "out_complement_p"});
    if (!node["availability"]) r.fail(node, what + ": missing required field 'availability'");
    band.bandwidth_hz = r.optional_number(node, "bandwidth", what);
    band.arrival_rate = r.optional_number(node, "arrival_rate", what);
    band.availability = r.number(node["availability"], what + ".availability");
    band.out_complement_p = r.optional_number(node, "out_complement_p", what);
  }
  return band;
}

SecondaryUser read_user(const Reader& r, const YAML::Node& node, InputMode mode, std::size_t idx) {
  const std::string what = "users[" + std::to_string(idx + 1) + "]";
  SecondaryUser user;
  if (mode == InputMode::physical) {
    r.require_map(node, what, {"arrival_rate", "gamma", "sigma2"});
    for (const char* key : {"arrival_rate", "gamma", "sigma2"})
      if (!node[key]) r.fail(node, what + ": missing required field '" + key + "'");
    user.link = LinkParams{r.number(node["gamma"], what + ".gamma"),
                           r.number(node["sigma2"], what + ".sigma2")};
  } else {
    r.require_map(node, what, {"arrival_rate", "out_complement"});
    for (const char* key : {"arrival_rate", "out_complement"})
      if (!node[key]) r.fail(node, what + ": missing required field '" + key + "'");
    const YAML::Node row = node["out_complement"];
    if (!row.IsSequence()) r.fail(row, what + ".out_complement must be a list");
    std::vector<double> values;
    for (std::size_t j = 0; j < row.size(); ++j)
      values.push_back(r.number(row[j], what + ".out_complement[" + std::to_string(j + 1) + "]"));
    user.out_complement = std::move(values);
  }
  user.arrival_rate = r.number(node["arrival_rate"], what + ".arrival_rate");
  return user;
}

void emit_optional(std::ostringstream& out, const char* key, const std::optional<double>& v) {
  if (v) out << "    " << key << ": " << format_number(*v) << "\n";
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

Scenario parse_scenario(std::string_view text, const std::string& source) {
  const Reader r(source);
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  if (!root || root.IsNull()) throw ConfigError(source + ": empty scenario document");
  r.require_map(root, "scenario", {"slot", "mode", "bands", "users"});

  Scenario s;
  if (!root["mode"]) r.fail(root, "missing required field 'mode'");
  const std::string mode = root["mode"].as<std::string>();
  if (mode == "physical") {
    s.mode = InputMode::physical;
  } else if (mode == "abstract") {
    s.mode = InputMode::abstract;
  } else {
    r.fail(root["mode"], "mode must be 'physical' or 'abstract', got '" + mode + "'");
  }
  if (root["slot"]) s.slot = read_slot(r, root["slot"]);

  for (const char* key : {"bands", "users"}) {
    const YAML::Node list = root[key];
    if (!list) r.fail(root, std::string("missing required field '") + key + "'");
    if (!list.IsSequence() || list.size() == 0) r.fail(list, std::string(key) + " must be a nonempty list");
  }
  for (std::size_t j = 0; j < root["bands"].size(); ++j)
    s.bands.push_back(read_band(r, root["bands"][j], s.mode, j));
  for (std::size_t k = 0; k < root["users"].size(); ++k)
    s.users.push_back(read_user(r, root["users"][k], s.mode, k));

  try {
    s.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open scenario file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path);
}

std::string emit_scenario(const Scenario& s) {
  std::ostringstream out;
  out << "slot:\n";
  out << "  T: " << format_number(s.slot.T) << "\n";
  out << "  tau: " << format_number(s.slot.tau) << "\n";
  out << "  b: " << format_number(s.slot.b) << "\n";
  out << "mode: " << (s.mode == InputMode::physical ? "physical" : "abstract") << "\n";
  out << "bands:\n";
  for (const PrimaryBand& band : s.bands) {
    out << "  -\n";
    emit_optional(out, "bandwidth", band.bandwidth_hz);
    emit_optional(out, "arrival_rate", band.arrival_rate);
    if (band.link) {
      out << "    gamma: " << format_number(band.link->gamma) << "\n";
      out << "    sigma2: " << format_number(band.link->sigma2) << "\n";
    }
    emit_optional(out, "availability", band.availability);
    emit_optional(out, "out_complement_p", band.out_complement_p);
  }
  out << "users:\n";
  for (const SecondaryUser& user : s.users) {
    out << "  -\n";
    out << "    arrival_rate: " << format_number(user.arrival_rate) << "\n";
    if (user.link) {
      out << "    gamma: " << format_number(user.link->gamma) << "\n";
      out << "    sigma2: " << format_number(user.link->sigma2) << "\n";
    }
    if (user.out_complement) {
      out << "    out_complement: [";
      for (std::size_t j = 0; j < user.out_complement->size(); ++j)
        out << (j ? ", " : "") << format_number((*user.out_complement)[j]);
      out << "]\n";
    }
  }
  return out.str();
}

std::string scenario_digest(const Scenario& scenario) {
  const std::string text = emit_scenario(scenario);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xf];
  }
  return out;
}

}  // namespace bandalloc::io
