#include "ddgame/config.hpp"

#include <cerrno>
#include <climits>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "ddgame/errors.hpp"

namespace ddgame {

namespace {

struct RawValue {
  std::string value;
  int line = 0;
};

using RawSection = std::map<std::string, RawValue>;

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(const std::string& origin, int line,
                       const std::string& what) {
  throw ConfigError(origin + ":" + std::to_string(line) + ": " + what);
}

// Pulls typed values out of one section and complains about leftovers.
class SectionReader {
 public:
  SectionReader(const std::string& origin, std::string name, RawSection raw)
      : origin_(origin), name_(std::move(name)), raw_(std::move(raw)) {}

  std::optional<std::string> take(const std::string& key) {
    const auto it = raw_.find(key);
    if (it == raw_.end()) return std::nullopt;
    last_line_ = it->second.line;
    std::string value = it->second.value;
    raw_.erase(it);
    return value;
  }

  double take_double(const std::string& key, double fallback) {
    const auto v = take(key);
    return v ? parse_double(*v) : fallback;
  }

  long take_long(const std::string& key, long fallback) {
    const auto v = take(key);
    return v ? parse_long(*v) : fallback;
  }

  int take_int(const std::string& key, int fallback) {
    const long v = take_long(key, fallback);
    if (v < INT_MIN || v > INT_MAX) fail_here(key + " out of int range");
    return static_cast<int>(v);
  }

  bool take_bool(const std::string& key, bool fallback) {
    const auto v = take(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1") return true;
    if (*v == "false" || *v == "0") return false;
    fail_here(key + " must be true/false/1/0, got '" + *v + "'");
  }

  // "auto" and absence both mean: derive it.
  std::optional<double> take_auto_double(const std::string& key) {
    const auto v = take(key);
    if (!v || *v == "auto") return std::nullopt;
    return parse_double(*v);
  }

  std::optional<double> take_opt_double(const std::string& key) {
    const auto v = take(key);
    if (!v) return std::nullopt;
    return parse_double(*v);
  }

  std::optional<std::uint64_t> take_opt_u64(const std::string& key) {
    const auto v = take(key);
    if (!v) return std::nullopt;
    errno = 0;
    char* end = nullptr;
    const unsigned long long out = std::strtoull(v->c_str(), &end, 10);
    if (errno != 0 || end == v->c_str() || *end != '\0')
      fail_here(key + ": expected unsigned integer, got '" + *v + "'");
    return static_cast<std::uint64_t>(out);
  }

  std::vector<double> take_double_list(const std::string& key) {
    const auto v = take(key);
    if (!v) return {};
    std::vector<double> out;
    std::stringstream ss(*v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(trim(item)));
    if (out.empty()) fail_here(key + ": empty list");
    return out;
  }

  void finish() const {
    if (raw_.empty()) return;
    const auto& [key, rv] = *raw_.begin();
    fail(origin_, rv.line, "unknown key '" + key + "' in [" + name_ + "]");
  }

  [[noreturn]] void fail_here(const std::string& what) const {
    fail(origin_, last_line_, what);
  }

 private:
  double parse_double(const std::string& v) {
    errno = 0;
    char* end = nullptr;
    const double out = std::strtod(v.c_str(), &end);
    if (errno != 0 || end == v.c_str() || *end != '\0')
      fail_here("expected number, got '" + v + "'");
    return out;
  }

  long parse_long(const std::string& v) {
    errno = 0;
    char* end = nullptr;
    const long out = std::strtol(v.c_str(), &end, 10);
    if (errno != 0 || end == v.c_str() || *end != '\0')
      fail_here("expected integer, got '" + v + "'");
    return out;
  }

  std::string origin_;
  std::string name_;
  RawSection raw_;
  mutable int last_line_ = 0;
};

std::map<std::string, RawSection> scan(const std::string& text,
                                       const std::string& origin) {
  static const char* known[] = {"market", "sampling", "learning", "solver",
                                "run"};
  std::map<std::string, RawSection> sections;
  std::istringstream in(text);
  std::string line;
  std::string current;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') fail(origin, lineno, "unterminated section header");
      current = trim(t.substr(1, t.size() - 2));
      bool ok = false;
      for (const char* k : known) ok = ok || current == k;
      if (!ok) fail(origin, lineno, "unknown section [" + current + "]");
      sections.try_emplace(current);
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      fail(origin, lineno, "expected 'key = value', got '" + t + "'");
    if (current.empty()) fail(origin, lineno, "key before any [section]");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) fail(origin, lineno, "empty key");
    if (value.empty()) fail(origin, lineno, "empty value for '" + key + "'");
    if (!sections[current].emplace(key, RawValue{value, lineno}).second)
      fail(origin, lineno, "duplicate key '" + key + "'");
  }
  return sections;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& origin) {
  auto sections = scan(text, origin);
  const auto grab = [&](const char* name) {
    auto it = sections.find(name);
    RawSection raw = it == sections.end() ? RawSection{} : std::move(it->second);
    return SectionReader(origin, name, std::move(raw));
  };

  ExperimentConfig cfg;

  {
    SectionReader s = grab("market");
    cfg.market.n = s.take_int("n", cfg.market.n);
    if (cfg.market.n < 1) s.fail_here("n must be >= 1");
    cfg.market.lambda = s.take_double("lambda", cfg.market.lambda);
    if (!(cfg.market.lambda > 0)) s.fail_here("lambda must be > 0");
    cfg.market.p_w = s.take_double("p_w", cfg.market.p_w);
    cfg.market.p_r = s.take_double("p_r", cfg.market.p_r);
    if (!(0 < cfg.market.p_w && cfg.market.p_w < cfg.market.p_r))
      s.fail_here("need 0 < p_w < p_r");
    cfg.market.w = s.take_double("w", cfg.market.w);
    cfg.market.b_noise_std = s.take_double("b_noise_std", cfg.market.b_noise_std);
    if (cfg.market.b_noise_std < 0) s.fail_here("b_noise_std must be >= 0");
    cfg.market.demand_days = s.take_int("demand_days", cfg.market.demand_days);
    if (cfg.market.demand_days < 8) s.fail_here("demand_days must be >= 8");
    cfg.market.seed = s.take_opt_u64("seed");
    s.finish();
  }

  {
    SectionReader s = grab("sampling");
    cfg.sampling.m = s.take_long("m", cfg.sampling.m);
    if (cfg.sampling.m < 1) s.fail_here("m must be >= 1");
    cfg.sampling.box_lo = s.take_opt_double("box_lo");
    cfg.sampling.box_hi = s.take_opt_double("box_hi");
    if (cfg.sampling.box_lo.has_value() != cfg.sampling.box_hi.has_value())
      s.fail_here("box_lo and box_hi must be set together");
    if (cfg.sampling.box_lo && !(*cfg.sampling.box_lo < *cfg.sampling.box_hi))
      s.fail_here("need box_lo < box_hi");
    s.finish();
  }

  {
    SectionReader s = grab("learning");
    if (const auto v = s.take("method")) {
      if (*v == "least_squares")
        cfg.learning.method = LearnMethod::LeastSquares;
      else if (*v == "projected_gd")
        cfg.learning.method = LearnMethod::ProjectedGd;
      else if (*v == "perturb_true")
        cfg.learning.method = LearnMethod::PerturbTrue;
      else
        s.fail_here("method must be least_squares|projected_gd|perturb_true");
    }
    cfg.learning.radius = s.take_opt_double("radius");
    if (cfg.learning.radius && !(*cfg.learning.radius > 0))
      s.fail_here("radius must be > 0");
    cfg.learning.delta = s.take_double("delta", cfg.learning.delta);
    if (!(0 < cfg.learning.delta && cfg.learning.delta < 1))
      s.fail_here("delta must lie in (0, 1)");
    cfg.learning.ridge = s.take_bool("ridge", cfg.learning.ridge);
    cfg.learning.erm_steps = s.take_int("erm_steps", cfg.learning.erm_steps);
    if (cfg.learning.erm_steps < 1) s.fail_here("erm_steps must be >= 1");
    cfg.learning.perturb_std =
        s.take_double("perturb_std", cfg.learning.perturb_std);
    if (cfg.learning.perturb_std < 0) s.fail_here("perturb_std must be >= 0");
    if (cfg.learning.method == LearnMethod::ProjectedGd &&
        !cfg.learning.radius)
      s.fail_here("method projected_gd requires radius");
    s.finish();
  }

  {
    SectionReader s = grab("solver");
    if (const auto v = s.take("mode")) {
      if (*v == "constant")
        cfg.solver.mode = StepMode::Constant;
      else if (*v == "decaying")
        cfg.solver.mode = StepMode::Decaying;
      else
        s.fail_here("mode must be constant|decaying");
    }
    cfg.solver.r = s.take_double("r", cfg.solver.r);
    if (cfg.solver.mode == StepMode::Decaying && !(cfg.solver.r > 2))
      s.fail_here("decaying mode needs r > 2");
    cfg.solver.alpha = s.take_auto_double("alpha");
    if (cfg.solver.alpha && !(*cfg.solver.alpha > 0))
      s.fail_here("alpha must be > 0");
    cfg.solver.iterations = s.take_int("iterations", cfg.solver.iterations);
    if (cfg.solver.iterations < 1) s.fail_here("iterations must be >= 1");
    cfg.solver.batch = s.take_int("batch", cfg.solver.batch);
    if (cfg.solver.batch < 1) s.fail_here("batch must be >= 1");
    cfg.solver.omega = s.take_auto_double("omega");
    if (cfg.solver.omega && !(*cfg.solver.omega > 0))
      s.fail_here("omega must be > 0");
    cfg.solver.x0 = s.take_double_list("x0");
    s.finish();
  }

  {
    SectionReader s = grab("run");
    cfg.run.trials = s.take_int("trials", cfg.run.trials);
    if (cfg.run.trials < 1) s.fail_here("trials must be >= 1");
    if (const auto v = s.take("output_dir")) cfg.run.output_dir = *v;
    if (const auto v = s.take_opt_u64("master_seed")) cfg.run.master_seed = *v;
    cfg.run.threads = s.take_int("threads", cfg.run.threads);
    if (cfg.run.threads < 0) s.fail_here("threads must be >= 0");
    cfg.run.log_stride = s.take_int("log_stride", cfg.run.log_stride);
    if (cfg.run.log_stride < 1) s.fail_here("log_stride must be >= 1");
    cfg.run.draw_from_truth =
        s.take_bool("draw_from_truth", cfg.run.draw_from_truth);
    s.finish();
  }

  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

const char* to_string(LearnMethod method) {
  switch (method) {
    case LearnMethod::LeastSquares: return "least_squares";
    case LearnMethod::ProjectedGd: return "projected_gd";
    case LearnMethod::PerturbTrue: return "perturb_true";
  }
  return "?";
}

const char* to_string(StepMode mode) {
  switch (mode) {
    case StepMode::Constant: return "constant";
    case StepMode::Decaying: return "decaying";
  }
  return "?";
}

}  // namespace ddgame
