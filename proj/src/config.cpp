#include "emowalk/config.hpp"

#include "emowalk/errors.hpp"
#include "emowalk/text.hpp"

#include <cmath>
#include <limits>

namespace emowalk::config {

namespace {

[[noreturn]] void bad(std::string_view section, std::string_view key, std::string_view value,
                      std::string_view expected) {
  throw InvalidConfig("[" + std::string(section) + "] " + std::string(key) + " = '" + std::string(value) +
                      "': expected " + std::string(expected));
}

long long as_int(std::string_view s, std::string_view key, std::string_view value, long long lo, long long hi) {
  const auto v = text::parse_int(value);
  if (!v || *v < lo || *v > hi)
    bad(s, key, value, "an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return *v;
}

double as_double(std::string_view s, std::string_view key, std::string_view value) {
  const auto v = text::parse_double(value);
  if (!v || !std::isfinite(*v)) bad(s, key, value, "a number");
  return *v;
}

bool as_bool(std::string_view s, std::string_view key, std::string_view value) {
  if (value == "true") return true;
  if (value == "false") return false;
  bad(s, key, value, "true or false");
}

char as_delimiter(std::string_view value) {
  if (value == "tab") return '\t';
  if (value.size() == 1 && value != "#") return value.front();
  bad("ingest", "delimiter", value, "a single character or 'tab'");
}

std::string delimiter_name(char c) { return c == '\t' ? "tab" : std::string(1, c); }

std::string task_name(TaskSelection t) {
  switch (t) {
    case TaskSelection::Binary: return "binary";
    case TaskSelection::Ternary: return "ternary";
    case TaskSelection::Both: return "both";
  }
  return "?";
}

void set_forest(learners::HyperParams& hp, std::string_view key, std::string_view value) {
  constexpr std::string_view s = "forest";
  if (key == "n_trees") {
    hp.n_trees = static_cast<int>(as_int(s, key, value, 1, 100000));
  } else if (key == "max_depth") {
    if (value == "none")
      hp.max_depth.reset();
    else
      hp.max_depth = static_cast<int>(as_int(s, key, value, 1, 10000));
  } else if (key == "min_samples_split") {
    hp.min_samples_split = static_cast<int>(as_int(s, key, value, 2, 1000000));
  } else if (key == "min_samples_leaf") {
    hp.min_samples_leaf = static_cast<int>(as_int(s, key, value, 1, 1000000));
  } else if (key == "max_features") {
    hp.max_features = learners::MaxFeatures::parse(value);
  } else if (key == "bootstrap") {
    hp.bootstrap = as_bool(s, key, value);
  } else {
    throw InvalidConfig("unknown key [forest] " + std::string(key));
  }
}

std::vector<int> as_conditions(std::string_view value) {
  std::vector<int> out;
  for (auto item : text::split(value, ','))
    out.push_back(static_cast<int>(as_int("synth", "conditions", item, 0, 2)));
  return out;
}

}  // namespace

std::vector<eval::Task> tasks_of(TaskSelection t) {
  switch (t) {
    case TaskSelection::Binary: return {eval::Task::Binary};
    case TaskSelection::Ternary: return {eval::Task::Ternary};
    case TaskSelection::Both: break;
  }
  return {eval::Task::Binary, eval::Task::Ternary};
}

void set_value(RunConfig& cfg, std::string_view section, std::string_view key, std::string_view value) {
  section = text::trim(section);
  key = text::trim(key);
  value = text::trim(value);
  const auto unknown = [&] {
    throw InvalidConfig("unknown key [" + std::string(section) + "] " + std::string(key));
  };

  if (section == "paths") {
    if (key == "encoding")
      cfg.encoding = std::string(value);
    else if (key == "raw_dir")
      cfg.raw_dir = std::string(value);
    else if (key == "output_dir")
      cfg.output_dir = std::string(value);
    else
      unknown();
  } else if (section == "ingest") {
    if (key == "delimiter") {
      cfg.ingest.delimiter = as_delimiter(value);
    } else if (key == "strict") {
      cfg.ingest.strict = as_bool(section, key, value);
    } else if (key.starts_with("prefix.") && key.size() > 7) {
      cfg.ingest.prefixes[std::string(key.substr(7))] = static_cast<int>(as_int(section, key, value, 0, 2));
    } else {
      unknown();
    }
  } else if (section == "windowing") {
    auto& w = cfg.windowing;
    if (key == "window_len")
      w.window_len = static_cast<std::size_t>(as_int(section, key, value, 2, 1000000));
    else if (key == "overlap")
      w.overlap = as_double(section, key, value);
    else if (key == "frequency_rate")
      w.frequency_rate = as_double(section, key, value);
    else
      unknown();
  } else if (section == "protocol") {
    auto& p = cfg.protocol;
    if (key == "task") {
      if (value == "binary")
        cfg.task = TaskSelection::Binary;
      else if (value == "ternary")
        cfg.task = TaskSelection::Ternary;
      else if (value == "both")
        cfg.task = TaskSelection::Both;
      else
        bad(section, key, value, "binary, ternary or both");
    } else if (key == "k") {
      p.k = static_cast<int>(as_int(section, key, value, 2, 1000));
    } else if (key == "n_iter") {
      p.n_iter = static_cast<int>(as_int(section, key, value, 1, 100000));
    } else if (key == "seed") {
      const auto v = text::parse_int(value);
      if (!v || *v < 0) bad(section, key, value, "a non-negative integer");
      p.seed = static_cast<std::uint64_t>(*v);
    } else if (key == "fold_mode") {
      p.fold_mode = tuning::parse_fold_mode(value);
    } else if (key == "threads") {
      p.threads = static_cast<unsigned>(as_int(section, key, value, 0, 1024));
    } else {
      unknown();
    }
  } else if (section == "logistic") {
    auto& l = cfg.protocol.logistic;
    if (key == "reg_strength") {
      l.reg_strength = as_double(section, key, value);
      if (l.reg_strength < 0.0) bad(section, key, value, "a non-negative number");
    } else if (key == "max_iters") {
      l.max_iters = static_cast<int>(as_int(section, key, value, 1, 100000000));
    } else if (key == "tol") {
      l.tol = as_double(section, key, value);
      if (!(l.tol > 0.0)) bad(section, key, value, "a positive number");
    } else {
      unknown();
    }
  } else if (section == "forest") {
    set_forest(cfg.protocol.default_forest, key, value);
  } else if (section == "search") {
    cfg.protocol.space = tuning::parse_search_space(tuning::format_search_space(cfg.protocol.space) +
                                                    std::string(key) + " = " + std::string(value) + "\n");
  } else if (section == "synth") {
    auto& s = cfg.synth;
    if (key == "n_users")
      s.n_users = static_cast<int>(as_int(section, key, value, 1, 999));
    else if (key == "conditions")
      s.conditions = as_conditions(value);
    else if (key == "walk_duration_s")
      s.walk_duration_s = as_double(section, key, value);
    else if (key == "sample_rate_hz")
      s.sample_rate_hz = as_double(section, key, value);
    else if (key == "separability")
      s.separability = as_double(section, key, value);
    else if (key == "seed")
      s.seed = static_cast<std::uint64_t>(as_int(section, key, value, 0, std::numeric_limits<long long>::max()));
    else
      unknown();
  } else {
    throw InvalidConfig("unknown section [" + std::string(section) + "]");
  }
}

void apply_override(RunConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string_view::npos || dot == std::string_view::npos || dot > eq)
    throw InvalidConfig("override '" + std::string(assignment) + "' must look like section.key=value");
  set_value(cfg, assignment.substr(0, dot), assignment.substr(dot + 1, eq - dot - 1), assignment.substr(eq + 1));
}

RunConfig parse_config(std::string_view content, RunConfig base) {
  text::LineReader reader(content);
  std::string_view line;
  std::string section;
  while (reader.next(line)) {
    for (std::size_t i = 1; i < line.size(); ++i)
      if (line[i] == '#' && (line[i - 1] == ' ' || line[i - 1] == '\t')) {
        line = line.substr(0, i);
        break;
      }
    line = text::trim(line);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    const auto where = "config line " + std::to_string(reader.line_number()) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw InvalidConfig(where + "unterminated section header");
      section = std::string(text::trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw InvalidConfig(where + "expected key = value");
    if (section.empty()) throw InvalidConfig(where + "key outside of any [section]");
    try {
      set_value(base, section, line.substr(0, eq), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw InvalidConfig(where + e.what());
    }
  }
  return base;
}

std::string canonical(const RunConfig& cfg) {
  std::string out;
  const auto put = [&](std::string_view k, const std::string& v) { out += std::string(k) + " = " + v + "\n"; };
  put("ingest.delimiter", delimiter_name(cfg.ingest.delimiter));
  put("ingest.strict", cfg.ingest.strict ? "true" : "false");
  for (const auto& [code, cond] : cfg.ingest.prefixes) put("ingest.prefix." + code, std::to_string(cond));
  put("windowing.window_len", std::to_string(cfg.windowing.window_len));
  put("windowing.overlap", text::format_double(cfg.windowing.overlap));
  put("windowing.frequency_rate", text::format_double(cfg.windowing.frequency_rate));
  const auto& p = cfg.protocol;
  put("protocol.task", task_name(cfg.task));
  put("protocol.k", std::to_string(p.k));
  put("protocol.n_iter", std::to_string(p.n_iter));
  put("protocol.seed", std::to_string(p.seed));
  put("protocol.fold_mode", tuning::to_string(p.fold_mode));
  put("logistic.reg_strength", text::format_double(p.logistic.reg_strength));
  put("logistic.max_iters", std::to_string(p.logistic.max_iters));
  put("logistic.tol", text::format_double(p.logistic.tol));
  put("forest", p.default_forest.to_string());
  const auto space_text = tuning::format_search_space(p.space);
  text::LineReader space(space_text);
  std::string_view line;
  while (space.next(line))
    if (!line.empty()) out += "search." + std::string(line) + "\n";
  const auto& s = cfg.synth;
  std::string conds;
  for (std::size_t i = 0; i < s.conditions.size(); ++i) conds += (i ? "," : "") + std::to_string(s.conditions[i]);
  put("synth.n_users", std::to_string(s.n_users));
  put("synth.conditions", conds);
  put("synth.walk_duration_s", text::format_double(s.walk_duration_s));
  put("synth.sample_rate_hz", text::format_double(s.sample_rate_hz));
  put("synth.separability", text::format_double(s.separability));
  put("synth.seed", std::to_string(s.seed));
  put("features.catalog_version", std::to_string(features::kCatalogVersion));
  return out;
}

std::string digest(const RunConfig& cfg) { return text::hex_digest(canonical(cfg)); }

}  // namespace emowalk::config
