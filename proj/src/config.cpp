#include "bai/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "bai/errors.hpp"

namespace bai {

namespace {

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

using Section = std::map<std::string, Entry>;

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

[[noreturn]] void fail(int line, const std::string& what) {
  std::ostringstream os;
  os << "config line " << line << ": " << what;
  throw ConfigError(os.str());
}

double parse_double(const Entry& e, const std::string& key) {
  try {
    size_t pos = 0;
    const double v = std::stod(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    fail(e.line, "field '" + key + "': expected a number, got '" + e.value + "'");
  }
}

int64_t parse_int(const Entry& e, const std::string& key) {
  try {
    size_t pos = 0;
    const int64_t v = std::stoll(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    fail(e.line, "field '" + key + "': expected an integer, got '" + e.value + "'");
  }
}

std::string fmt_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Threshold parse_threshold(const std::string& text, int line) {
  std::vector<std::string> parts;
  {
    std::istringstream is(text);
    std::string tok;
    while (is >> tok) {
      for (std::string& piece : split_list(tok, ':')) parts.push_back(piece);
    }
  }
  if (parts.empty()) fail(line, "field 'threshold': empty value");
  if (parts[0] == "heuristic") {
    if (parts.size() != 1) fail(line, "field 'threshold': heuristic takes no parameters");
    return Threshold::heuristic();
  }
  if (parts[0] == "deviational") {
    if (parts.size() != 3)
      fail(line, "field 'threshold': expected 'deviational <c> <alpha>'");
    try {
      return Threshold::deviational(std::stod(parts[1]), std::stod(parts[2]));
    } catch (const std::exception& e) {
      fail(line, std::string("field 'threshold': ") + e.what());
    }
  }
  fail(line, "field 'threshold': unknown kind '" + parts[0] + "'");
}

Entry& require(Section& section, const std::string& section_name, const std::string& key) {
  const auto it = section.find(key);
  if (it == section.end())
    throw ConfigError("config: missing field '" + key + "' in [" + section_name + "]");
  it->second.used = true;
  return it->second;
}

Entry* optional(Section& section, const std::string& key) {
  const auto it = section.find(key);
  if (it == section.end()) return nullptr;
  it->second.used = true;
  return &it->second;
}

}  // namespace

ParsedConfig parse_config_text(const std::string& text) {
  std::map<std::string, Section> sections;
  std::map<std::string, int> section_lines;
  {
    std::istringstream is(text);
    std::string raw;
    std::string current;
    int line = 0;
    while (std::getline(is, raw)) {
      ++line;
      std::string s = trim(raw);
      if (const size_t hash = s.find('#'); hash != std::string::npos)
        s = trim(s.substr(0, hash));
      if (s.empty()) continue;
      if (s.front() == '[') {
        if (s.back() != ']') fail(line, "unterminated section header");
        current = trim(s.substr(1, s.size() - 2));
        if (current != "instance" && current != "experiment" && current != "output")
          fail(line, "unknown section [" + current + "]");
        section_lines[current] = line;
        sections[current];  // ensure present
        continue;
      }
      const size_t eq = s.find('=');
      if (eq == std::string::npos) fail(line, "expected 'key = value'");
      if (current.empty()) fail(line, "key outside any section");
      const std::string key = trim(s.substr(0, eq));
      const std::string value = trim(s.substr(eq + 1));
      if (key.empty()) fail(line, "empty key");
      if (sections[current].count(key)) fail(line, "duplicate key '" + key + "'");
      sections[current][key] = Entry{value, line, false};
    }
  }
  if (!sections.count("instance")) throw ConfigError("config: missing [instance] section");
  if (!sections.count("experiment"))
    throw ConfigError("config: missing [experiment] section");

  Section& inst_sec = sections["instance"];
  const std::string model_name = require(inst_sec, "instance", "model").value;
  double sigma2 = 1.0, scale = 1.0;
  if (Entry* e = optional(inst_sec, "sigma2")) sigma2 = parse_double(*e, "sigma2");
  if (Entry* e = optional(inst_sec, "scale")) scale = parse_double(*e, "scale");
  Entry& means_entry = require(inst_sec, "instance", "means");
  std::vector<double> means;
  for (const std::string& tok : split_list(means_entry.value)) {
    try {
      means.push_back(std::stod(tok));
    } catch (const std::exception&) {
      fail(means_entry.line, "field 'means': bad number '" + tok + "'");
    }
  }

  Model model = Model::bernoulli();
  try {
    model = Model::from_name(model_name, sigma2, scale);
  } catch (const std::exception& e) {
    fail(require(inst_sec, "instance", "model").line, e.what());
  }

  Section& exp_sec = sections["experiment"];
  std::vector<PolicyKind> policies;
  Entry& pol_entry = require(exp_sec, "experiment", "policies");
  for (const std::string& tok : split_list(pol_entry.value)) {
    try {
      policies.push_back(PolicyKind::from_label(tok));
    } catch (const std::exception& e) {
      fail(pol_entry.line, e.what());
    }
  }
  std::vector<double> deltas;
  Entry& delta_entry = require(exp_sec, "experiment", "deltas");
  for (const std::string& tok : split_list(delta_entry.value)) {
    try {
      deltas.push_back(std::stod(tok));
    } catch (const std::exception&) {
      fail(delta_entry.line, "field 'deltas': bad number '" + tok + "'");
    }
  }

  Instance instance = [&]() {
    try {
      return Instance(model, means);
    } catch (const std::exception& e) {
      fail(means_entry.line, e.what());
    }
  }();

  ExperimentConfig experiment{std::move(instance), std::move(policies),
                              std::move(deltas)};
  if (Entry* e = optional(exp_sec, "n_runs"))
    experiment.n_runs = static_cast<int>(parse_int(*e, "n_runs"));
  if (Entry* e = optional(exp_sec, "master_seed"))
    experiment.master_seed = static_cast<uint64_t>(parse_int(*e, "master_seed"));
  if (Entry* e = optional(exp_sec, "threshold"))
    experiment.threshold = parse_threshold(e->value, e->line);
  if (Entry* e = optional(exp_sec, "horizon_cap"))
    experiment.horizon_cap = parse_int(*e, "horizon_cap");
  if (Entry* e = optional(exp_sec, "workers"))
    experiment.workers = static_cast<int>(parse_int(*e, "workers"));

  ParsedConfig out{std::move(experiment)};
  if (sections.count("output")) {
    Section& out_sec = sections["output"];
    if (Entry* e = optional(out_sec, "directory")) out.out_dir = e->value;
    if (Entry* e = optional(out_sec, "formats")) {
      out.write_records = false;
      out.write_aggregates = false;
      for (const std::string& tok : split_list(e->value)) {
        if (tok == "records")
          out.write_records = true;
        else if (tok == "aggregates")
          out.write_aggregates = true;
        else
          fail(e->line, "field 'formats': unknown format '" + tok + "'");
      }
    }
  }

  for (const auto& [name, section] : sections)
    for (const auto& [key, entry] : section)
      if (!entry.used) fail(entry.line, "unknown key '" + key + "' in [" + name + "]");

  out.experiment.validate();
  return out;
}

ParsedConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config_text(os.str());
}

std::string dump_config(const ParsedConfig& config) {
  const ExperimentConfig& e = config.experiment;
  std::ostringstream os;
  os << "[instance]\n";
  os << "model = " << e.instance.model().name() << '\n';
  if (e.instance.model().family() == Family::Gaussian)
    os << "sigma2 = " << fmt_full(e.instance.model().sigma2()) << '\n';
  if (e.instance.model().family() == Family::Pareto)
    os << "scale = " << fmt_full(e.instance.model().scale()) << '\n';
  os << "means = ";
  for (int i = 0; i < e.instance.num_arms(); ++i)
    os << (i ? ", " : "") << fmt_full(e.instance.mean(i));
  os << "\n\n[experiment]\npolicies = ";
  for (size_t i = 0; i < e.policies.size(); ++i) {
    os << (i ? ", " : "") << e.policies[i].label();
    if (e.policies[i].name == PolicyKind::Name::T3C && e.policies[i].beta != 0.5)
      os << ':' << fmt_full(e.policies[i].beta);
  }
  os << "\ndeltas = ";
  for (size_t i = 0; i < e.deltas.size(); ++i)
    os << (i ? ", " : "") << fmt_full(e.deltas[i]);
  os << "\nn_runs = " << e.n_runs;
  os << "\nmaster_seed = " << e.master_seed;
  os << "\nthreshold = ";
  if (e.threshold.kind == Threshold::Kind::HeuristicLogLog)
    os << "heuristic";
  else
    os << "deviational " << fmt_full(e.threshold.c) << ' ' << fmt_full(e.threshold.alpha);
  os << "\nhorizon_cap = " << e.horizon_cap;
  os << "\nworkers = " << e.workers;
  os << "\n\n[output]\ndirectory = " << config.out_dir << "\nformats = ";
  bool first = true;
  if (config.write_records) {
    os << "records";
    first = false;
  }
  if (config.write_aggregates) os << (first ? "" : ", ") << "aggregates";
  os << '\n';
  return os.str();
}

}  // namespace bai
