#include "curepinn/config.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "curepinn/errors.hpp"

namespace curepinn {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

// Raw key/value pairs in file order, consumed as they are recognized.
class KeyBag {
 public:
  void insert(const std::string& key, const std::string& value, int line) {
    if (entries_.count(key))
      throw ConfigError("duplicate config key: " + key);
    entries_[key] = value;
    lines_[key] = line;
  }

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  // Removes and returns the value; caller guarantees presence.
  std::string take(const std::string& key) {
    auto it = entries_.find(key);
    std::string v = it->second;
    entries_.erase(it);
    return v;
  }

  double take_number(const std::string& key) {
    const std::string v = take(key);
    try {
      std::size_t pos = 0;
      const double x = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return x;
    } catch (const std::exception&) {
      throw ConfigError("config key " + key + " expects a number, got '" + v + "'");
    }
  }

  bool take_bool(const std::string& key) {
    const std::string v = lower(take(key));
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("config key " + key + " expects a boolean, got '" + v + "'");
  }

  // The first unconsumed key, by line number, or empty if none remain.
  std::string first_unconsumed() const {
    std::string best;
    int best_line = INT32_MAX;
    for (const auto& [k, v] : entries_) {
      const int line = lines_.at(k);
      if (line < best_line) {
        best_line = line;
        best = k;
      }
    }
    return best;
  }

 private:
  std::map<std::string, std::string> entries_;
  std::map<std::string, int> lines_;
};

// Reads one value that may be spelled in alternative units. `specs` pairs
// each accepted key with a factor/offset transform into SI.
struct UnitKey {
  const char* key;
  double scale;
  double offset;
};

bool take_unit_value(KeyBag& bag, std::initializer_list<UnitKey> specs,
                     double* out) {
  const UnitKey* found = nullptr;
  for (const auto& s : specs) {
    if (!bag.has(s.key)) continue;
    if (found)
      throw ConfigError(std::string("config keys ") + found->key + " and " +
                        s.key + " are alternative spellings; give only one");
    found = &s;
  }
  if (!found) return false;
  *out = bag.take_number(found->key) * found->scale + found->offset;
  return true;
}

void apply_bag(KeyBag& bag, ProblemConfig& cfg) {
  take_unit_value(bag, {{"geometry.Lt_m", 1.0, 0.0}, {"geometry.Lt_mm", 1e-3, 0.0}},
                  &cfg.Lt);
  take_unit_value(bag, {{"geometry.Lc_m", 1.0, 0.0}, {"geometry.Lc_mm", 1e-3, 0.0}},
                  &cfg.Lc);

  auto constituent = [&](const char* group, ConstituentProps& p) {
    const std::string g = std::string("materials.") + group + ".";
    if (bag.has(g + "nu")) p.nu = bag.take_number(g + "nu");
    if (bag.has(g + "rho")) p.rho = bag.take_number(g + "rho");
    if (bag.has(g + "k")) p.k = bag.take_number(g + "k");
    if (bag.has(g + "cp")) p.cp = bag.take_number(g + "cp");
  };
  constituent("fibre", cfg.fibre);
  constituent("resin", cfg.resin);
  if (bag.has("materials.tool.rho")) cfg.tool.rho = bag.take_number("materials.tool.rho");
  if (bag.has("materials.tool.k")) cfg.tool.k = bag.take_number("materials.tool.k");
  if (bag.has("materials.tool.cp")) cfg.tool.cp = bag.take_number("materials.tool.cp");
  if (bag.has("materials.composite.k"))
    cfg.k_composite_override = bag.take_number("materials.composite.k");

  if (bag.has("Hr_J_per_kg")) cfg.Hr = bag.take_number("Hr_J_per_kg");

  auto& kp = cfg.kinetics;
  if (bag.has("kinetics.A")) kp.A = bag.take_number("kinetics.A");
  if (bag.has("kinetics.dE")) kp.dE = bag.take_number("kinetics.dE");
  if (bag.has("kinetics.M")) kp.M = bag.take_number("kinetics.M");
  if (bag.has("kinetics.N")) kp.N = bag.take_number("kinetics.N");
  if (bag.has("kinetics.C")) kp.C = bag.take_number("kinetics.C");
  if (bag.has("kinetics.C0")) kp.C0 = bag.take_number("kinetics.C0");
  if (bag.has("kinetics.CT")) kp.CT = bag.take_number("kinetics.CT");
  if (bag.has("kinetics.R")) kp.R = bag.take_number("kinetics.R");
  if (bag.has("kinetics.literal_denominator"))
    kp.literal_denominator = bag.take_bool("kinetics.literal_denominator");

  auto& cy = cfg.cycle;
  take_unit_value(bag, {{"cycle.T0_K", 1.0, 0.0}, {"cycle.T0_C", 1.0, 273.15}},
                  &cy.T0);
  take_unit_value(bag, {{"cycle.Th_K", 1.0, 0.0}, {"cycle.Th_C", 1.0, 273.15}},
                  &cy.Th);
  take_unit_value(bag, {{"cycle.t_hs_s", 1.0, 0.0}, {"cycle.t_hs_min", 60.0, 0.0}},
                  &cy.t_hs);
  take_unit_value(bag, {{"cycle.t_he_s", 1.0, 0.0}, {"cycle.t_he_min", 60.0, 0.0}},
                  &cy.t_he);
  take_unit_value(bag, {{"cycle.t_e_s", 1.0, 0.0}, {"cycle.t_e_min", 60.0, 0.0}},
                  &cy.t_e);
  bool t_end_given = take_unit_value(
      bag, {{"cycle.T_end_K", 1.0, 0.0}, {"cycle.T_end_C", 1.0, 273.15}}, &cy.T_end);
  if (!t_end_given) cy.T_end = cy.T0;  // cool back to the start temperature

  if (bag.has("bc.kind")) {
    const std::string kind = lower(bag.take("bc.kind"));
    if (kind == "prescribed")
      cfg.bc.kind = BcKind::Prescribed;
    else if (kind == "convective")
      cfg.bc.kind = BcKind::Convective;
    else
      throw ConfigError("bc.kind must be 'prescribed' or 'convective', got '" +
                        kind + "'");
  }
  if (bag.has("bc.h_t")) cfg.bc.h_t = bag.take_number("bc.h_t");
  if (bag.has("bc.h_c")) cfg.bc.h_c = bag.take_number("bc.h_c");

  bool t_init_given =
      take_unit_value(bag, {{"init.T_K", 1.0, 0.0}, {"init.T_C", 1.0, 273.15}},
                      &cfg.T_init);
  if (!t_init_given) cfg.T_init = cfg.cycle.T0;
  if (bag.has("init.alpha0")) cfg.alpha0 = bag.take_number("init.alpha0");

  const std::string stray = bag.first_unconsumed();
  if (!stray.empty()) throw ConfigError("unknown config key: " + stray);
}

}  // namespace

ProblemConfig parse_config_text(const std::string& text) {
  KeyBag bag;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        " is not of the form key = value: '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("config line " + std::to_string(line_no) +
                        " has an empty key or value");
    bag.insert(key, value, line_no);
  }

  ProblemConfig cfg;
  apply_bag(bag, cfg);
  validate_config(cfg);
  return cfg;
}

ProblemConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream body;
  body << in.rdbuf();
  return parse_config_text(body.str());
}

ProblemConfig preset_config(const std::string& name) {
  ProblemConfig cfg;  // defaults describe the thin prescribed-temperature slab
  if (name == "case1") {
    // defaults as-is
  } else if (name == "case2") {
    cfg.bc = {BcKind::Convective, 70.0, 120.0};
  } else if (name == "case3") {
    cfg.Lt = 0.2;
    cfg.Lc = 0.3;
  } else if (name == "case4") {
    cfg.Lt = 0.2;
    cfg.Lc = 0.3;
    cfg.bc = {BcKind::Convective, 70.0, 120.0};
  } else if (name == "case1a") {
    cfg.tool.k = 11.70;
    cfg.k_composite_override = 0.702;
  } else if (name == "case3a") {
    cfg.Lt = 0.2;
    cfg.Lc = 0.3;
    cfg.tool.k = 11.70;
    cfg.k_composite_override = 0.702;
  } else {
    throw ConfigError("unknown preset: " + name);
  }
  validate_config(cfg);
  return cfg;
}

std::vector<std::string> preset_names() {
  return {"case1", "case2", "case3", "case4", "case1a", "case3a"};
}

std::string dump_config(const ProblemConfig& cfg) {
  std::ostringstream out;
  auto num = [&](const char* key, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << key << " = " << buf << "\n";
  };
  num("geometry.Lt_m", cfg.Lt);
  num("geometry.Lc_m", cfg.Lc);
  num("materials.fibre.nu", cfg.fibre.nu);
  num("materials.fibre.rho", cfg.fibre.rho);
  num("materials.fibre.k", cfg.fibre.k);
  num("materials.fibre.cp", cfg.fibre.cp);
  num("materials.resin.nu", cfg.resin.nu);
  num("materials.resin.rho", cfg.resin.rho);
  num("materials.resin.k", cfg.resin.k);
  num("materials.resin.cp", cfg.resin.cp);
  num("materials.tool.rho", cfg.tool.rho);
  num("materials.tool.k", cfg.tool.k);
  num("materials.tool.cp", cfg.tool.cp);
  if (cfg.k_composite_override) num("materials.composite.k", *cfg.k_composite_override);
  num("Hr_J_per_kg", cfg.Hr);
  num("kinetics.A", cfg.kinetics.A);
  num("kinetics.dE", cfg.kinetics.dE);
  num("kinetics.M", cfg.kinetics.M);
  num("kinetics.N", cfg.kinetics.N);
  num("kinetics.C", cfg.kinetics.C);
  num("kinetics.C0", cfg.kinetics.C0);
  num("kinetics.CT", cfg.kinetics.CT);
  num("kinetics.R", cfg.kinetics.R);
  out << "kinetics.literal_denominator = "
      << (cfg.kinetics.literal_denominator ? "true" : "false") << "\n";
  num("cycle.T0_K", cfg.cycle.T0);
  num("cycle.Th_K", cfg.cycle.Th);
  num("cycle.t_hs_s", cfg.cycle.t_hs);
  num("cycle.t_he_s", cfg.cycle.t_he);
  num("cycle.t_e_s", cfg.cycle.t_e);
  num("cycle.T_end_K", cfg.cycle.T_end);
  out << "bc.kind = "
      << (cfg.bc.kind == BcKind::Prescribed ? "prescribed" : "convective") << "\n";
  if (cfg.bc.kind == BcKind::Convective) {
    num("bc.h_t", cfg.bc.h_t);
    num("bc.h_c", cfg.bc.h_c);
  }
  num("init.T_K", cfg.T_init);
  num("init.alpha0", cfg.alpha0);
  return out.str();
}

std::string config_hash(const ProblemConfig& cfg) {
  const std::string text = dump_config(cfg);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace curepinn
