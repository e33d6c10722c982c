#include "oldb/config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "oldb/diagnostics.hpp"

namespace oldb {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"grid", {"dim", "points"}},
      {"physics", {"b", "mu", "K1", "K2"}},
      {"integrator", {"dt", "t_end", "cfl", "nonlinear", "split"}},
      {"initial",
       {"kind", "amplitude", "stress_amplitude", "k_min", "k_max", "decay", "epsilon", "envelope_width", "file",
        "seed"}},
      {"output", {"interval", "lebesgue_p", "snapshots"}},
  };
  return s;
}

void check_key(const std::string& section, const std::string& key) {
  const auto it = schema().find(section);
  if (it == schema().end()) throw ConfigError("unknown config section [" + section + "]");
  if (!it->second.count(key)) throw ConfigError("unknown config key '" + key + "' in [" + section + "]");
}

template <typename T>
void read(const pt::ptree& tree, const std::string& path, T& out) {
  const auto node = tree.get_optional<std::string>(path);
  if (!node) return;
  std::istringstream in(*node);
  T value{};
  if constexpr (std::is_same_v<T, bool>) {
    std::string word;
    in >> word;
    if (word == "true" || word == "1" || word == "yes") value = true;
    else if (word == "false" || word == "0" || word == "no") value = false;
    else throw ConfigError("'" + path + "' expects a boolean, got '" + *node + "'");
  } else {
    in >> value;
    if (in.fail()) throw ConfigError("'" + path + "' has malformed value '" + *node + "'");
    in >> std::ws;
    if (!in.eof()) throw ConfigError("'" + path + "' has trailing text in '" + *node + "'");
  }
  out = value;
}

RunConfig from_tree(const pt::ptree& tree) {
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) throw ConfigError("config key '" + section + "' outside a section");
    for (const auto& [key, value] : body) check_key(section, key);
  }
  RunConfig rc;
  SimConfig& c = rc.sim;
  read(tree, "grid.dim", c.dim);
  read(tree, "grid.points", c.points);
  read(tree, "physics.b", c.physics.b);
  read(tree, "physics.mu", c.physics.mu);
  read(tree, "physics.K1", c.physics.K1);
  read(tree, "physics.K2", c.physics.K2);
  read(tree, "integrator.dt", c.dt);
  read(tree, "integrator.t_end", c.t_end);
  read(tree, "integrator.cfl", c.cfl);
  read(tree, "integrator.nonlinear", c.nonlinear);
  read(tree, "integrator.split", c.split);
  if (auto kind = tree.get_optional<std::string>("initial.kind")) c.initial.kind = parse_initial_kind(*kind);
  read(tree, "initial.amplitude", c.initial.amplitude);
  read(tree, "initial.stress_amplitude", c.initial.stress_amplitude);
  read(tree, "initial.k_min", c.initial.k_min);
  read(tree, "initial.k_max", c.initial.k_max);
  read(tree, "initial.decay", c.initial.decay);
  read(tree, "initial.epsilon", c.initial.epsilon);
  read(tree, "initial.envelope_width", c.initial.envelope_width);
  if (auto file = tree.get_optional<std::string>("initial.file")) c.initial.file = *file;
  read(tree, "initial.seed", c.initial.seed);
  read(tree, "output.interval", c.output_interval);
  read(tree, "output.lebesgue_p", c.lebesgue_p);
  read(tree, "output.snapshots", rc.write_snapshots);
  c.validate();
  return rc;
}

void apply_overrides(pt::ptree& tree, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    const auto dot = o.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq)
      throw ConfigError("override '" + o + "' is not of the form section.key=value");
    const std::string section = o.substr(0, dot), key = o.substr(dot + 1, eq - dot - 1);
    check_key(section, key);
    tree.put(pt::ptree::path_type(section + "." + key, '.'), o.substr(eq + 1));
  }
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  apply_overrides(tree, overrides);
  return from_tree(tree);
}

RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), overrides);
}

std::string to_ini(const RunConfig& rc) {
  const SimConfig& c = rc.sim;
  std::ostringstream o;
  auto num = [](double v) { return format_number(v); };
  o << "[grid]\ndim=" << c.dim << "\npoints=" << c.points << "\n\n";
  o << "[physics]\nb=" << num(c.physics.b) << "\nmu=" << num(c.physics.mu) << "\nK1=" << num(c.physics.K1)
    << "\nK2=" << num(c.physics.K2) << "\n\n";
  o << "[integrator]\ndt=" << num(c.dt) << "\nt_end=" << num(c.t_end) << "\ncfl=" << num(c.cfl)
    << "\nnonlinear=" << (c.nonlinear ? "true" : "false") << "\nsplit=" << c.split << "\n\n";
  o << "[initial]\nkind=" << to_string(c.initial.kind) << "\namplitude=" << num(c.initial.amplitude)
    << "\nstress_amplitude=" << num(c.initial.stress_amplitude) << "\nk_min=" << num(c.initial.k_min)
    << "\nk_max=" << num(c.initial.k_max) << "\ndecay=" << num(c.initial.decay) << "\nepsilon=" << num(c.initial.epsilon)
    << "\nenvelope_width=" << num(c.initial.envelope_width) << "\n";
  if (!c.initial.file.empty()) o << "file=" << c.initial.file.string() << "\n";
  o << "seed=" << c.initial.seed << "\n\n";
  o << "[output]\ninterval=" << num(c.output_interval) << "\nlebesgue_p=" << num(c.lebesgue_p)
    << "\nsnapshots=" << (rc.write_snapshots ? "true" : "false") << "\n";
  return o.str();
}

}  // namespace oldb
