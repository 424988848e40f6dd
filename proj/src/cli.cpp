#include "prm/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "prm/acceptance.hpp"
#include "prm/diagnostics.hpp"
#include "prm/errors.hpp"
#include "prm/ldp.hpp"
#include "prm/model.hpp"
#include "prm/rate.hpp"
#include "prm/sampler.hpp"
#include "prm/spectral.hpp"

namespace prm {

namespace {

enum class Kind { real, integer, count, text, flag, int_list, real_list, model };

struct Key {
  const char* name;
  Kind kind;
  nlohmann::json fallback;
  const char* help;
};

const std::vector<Key>& schema() {
  static const std::vector<Key> keys{
      {"model", Kind::model, nullptr, "model file (or inline model object in a config)"},
      {"seed", Kind::count, nullptr, "seed, mandatory for stochastic commands"},
      {"workers", Kind::integer, 0, "worker threads, 0 = available parallelism"},
      {"out", Kind::text, ".", "output directory"},
      {"format", Kind::text, "json", "csv or json"},
      {"s", Kind::real, nullptr, "tilt s"},
      {"t", Kind::real, nullptr, "second tilt t (changed measure, perturbation frequency)"},
      {"q", Kind::real, nullptr, "threshold per step q"},
      {"l", Kind::real, 0.0, "perturbation l"},
      {"threshold", Kind::real, nullptr, "absolute threshold for enumerate"},
      {"n", Kind::integer, nullptr, "number of steps"},
      {"samples", Kind::count, nullptr, "Monte Carlo samples"},
      {"grid_n", Kind::integer, 1024, "grid nodes"},
      {"tol", Kind::real, 1e-12, "solver tolerance"},
      {"a1", Kind::real, 0.0, "interval start (may be -inf)"},
      {"a2", Kind::real, 1.0, "interval end (may be inf)"},
      {"x", Kind::real, 0.0, "angle of the starting vector v in radians"},
      {"y", Kind::real, 0.0, "angle of the functional f (or target y) in radians"},
      {"s_lo", Kind::real, -0.3, "rate table start"},
      {"s_hi", Kind::real, 1.5, "rate table end"},
      {"step", Kind::real, 0.01, "rate table spacing"},
      {"beta", Kind::real, 0.5, "moment exponent beta"},
      {"eta", Kind::real, 1.0, "moment exponent eta"},
      {"max_word_len", Kind::integer, 4, "longest word scanned by validate"},
      {"tail", Kind::text, nullptr, "upper or lower"},
      {"formula", Kind::text, "upper", "theory: upper, lower, llt or changed"},
      {"estimator", Kind::text, "importance", "estimate: importance, llt or changed"},
      {"diagnostic", Kind::text, nullptr, "regularity, decay, clt, lyapunov, cartan or iwasawa"},
      {"n_list", Kind::int_list, nullptr, "increasing step counts"},
      {"r_grid", Kind::real_list, nullptr, "decreasing radii in (0, 1]"},
      {"alpha", Kind::real, 0.1, "moment exponent for iwasawa"},
      {"epsilon", Kind::real, 0.5, "decay scale for regularity decay"},
      {"k_max", Kind::integer, 20, "deepest decay level"},
      {"criteria", Kind::int_list, nlohmann::json::array(), "acceptance criteria to run, empty = all"},
      {"allow_nonproximal", Kind::flag, false, "evaluate theory without a proximal witness"},
  };
  return keys;
}

const Key* find_key(const std::string& name) {
  for (const auto& k : schema()) {
    if (name == k.name) return &k;
  }
  return nullptr;
}

double parse_real(const std::string& text, const std::string& key) {
  if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("'" + key + "' expects a number, got '" + text + "'");
}

long long parse_integer(const std::string& text, const std::string& key) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("'" + key + "' expects an integer, got '" + text + "'");
}

// Reals are stored as numbers, or as "inf" / "-inf" since JSON has no infinity.
nlohmann::json store_real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

nlohmann::json coerce(const Key& key, const nlohmann::json& v) {
  const std::string name = key.name;
  auto bad = [&](const char* what) { return ConfigError("'" + name + "' expects " + what); };
  if (v.is_null()) return v;
  switch (key.kind) {
    case Kind::real:
      if (v.is_number()) return store_real(v.get<double>());
      if (v.is_string()) return store_real(parse_real(v.get<std::string>(), name));
      throw bad("a number");
    case Kind::integer:
      if (v.is_number_integer()) return v;
      if (v.is_string()) return parse_integer(v.get<std::string>(), name);
      throw bad("an integer");
    case Kind::count:
      if (v.is_number_unsigned()) return v;
      if (v.is_number_integer() && v.get<long long>() >= 0) return v.get<std::uint64_t>();
      if (v.is_string()) {
        const std::string text = v.get<std::string>();
        try {
          std::size_t used = 0;
          const unsigned long long c = std::stoull(text, &used);
          if (used == text.size() && text.front() != '-') return static_cast<std::uint64_t>(c);
        } catch (const std::exception&) {
        }
      }
      throw bad("a nonnegative integer");
    case Kind::text:
      if (v.is_string()) return v;
      throw bad("a string");
    case Kind::flag:
      if (v.is_boolean()) return v;
      throw bad("true or false");
    case Kind::int_list: {
      if (!v.is_array()) throw bad("a list of integers");
      nlohmann::json out = nlohmann::json::array();
      for (const auto& e : v) {
        if (e.is_number_integer()) out.push_back(e);
        else if (e.is_string()) out.push_back(parse_integer(e.get<std::string>(), name));
        else throw bad("a list of integers");
      }
      return out;
    }
    case Kind::real_list: {
      if (!v.is_array()) throw bad("a list of numbers");
      nlohmann::json out = nlohmann::json::array();
      for (const auto& e : v) {
        if (e.is_number()) out.push_back(e.get<double>());
        else if (e.is_string()) out.push_back(parse_real(e.get<std::string>(), name));
        else throw bad("a list of numbers");
      }
      return out;
    }
    case Kind::model:
      if (v.is_string() || v.is_object()) return v;
      throw bad("a path or a model object");
  }
  return v;
}

double real(const RunConfig& c, const std::string& key) {
  const auto& v = c.values.at(key);
  if (v.is_string()) return parse_real(v.get<std::string>(), key);
  return v.get<double>();
}

bool stochastic(const std::string& command) { return command == "estimate" || command == "diagnose"; }

void require(const RunConfig& c, const std::string& key) {
  if (!c.has(key)) throw ConfigError("command '" + c.command + "' needs '" + key + "'");
}

void require_one_of(const std::string& value, const std::vector<std::string>& allowed, const std::string& key) {
  if (std::find(allowed.begin(), allowed.end(), value) == allowed.end()) {
    std::string list;
    for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
    throw ConfigError("'" + key + "' must be one of " + list + ", got '" + value + "'");
  }
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string version_string() { return std::string("prmld ") + PRM_VERSION; }

}  // namespace

RunConfig default_config() {
  RunConfig c;
  for (const auto& k : schema()) c.values[k.name] = k.fallback;
  return c;
}

void apply_settings(RunConfig& config, const nlohmann::json& settings) {
  if (!settings.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [name, value] : settings.items()) {
    if (name == "command") {
      if (!value.is_string()) throw ConfigError("'command' expects a string");
      config.command = value.get<std::string>();
      continue;
    }
    const Key* key = find_key(name);
    if (!key) throw ConfigError("unknown config key '" + name + "'");
    config.values[name] = coerce(*key, value);
  }
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("malformed config file " + path.string() + ": " + e.what());
  }
  RunConfig c = default_config();
  c.base_dir = path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path();
  apply_settings(c, doc);
  return c;
}

void check_config(const RunConfig& c) {
  if (c.command.empty()) throw ConfigError("no command given");
  require_one_of(c.command, kCommands, "command");
  require_one_of(c.get<std::string>("format"), {"csv", "json"}, "format");
  if (c.get<int>("workers") < 0) throw ConfigError("'workers' must be nonnegative");
  const double tol = real(c, "tol");
  if (!(tol > 0.0 && tol < 1.0)) throw ConfigError("'tol' must lie in (0, 1)");
  if (c.get<int>("grid_n") < 16) throw ConfigError("'grid_n' must be at least 16");
  if (c.has("n") && c.get<int>("n") < 1) throw ConfigError("'n' must be positive");
  if (c.has("samples") && c.get<std::uint64_t>("samples") < 2) throw ConfigError("'samples' must be at least 2");
  if (c.has("tail")) require_one_of(c.get<std::string>("tail"), {"upper", "lower"}, "tail");
  if (c.command != "verify") require(c, "model");
  if (stochastic(c.command)) {
    if (!c.has("seed")) throw ConfigError("command '" + c.command + "' is stochastic and needs 'seed'");
    require(c, "samples");
  }
  const std::string& cmd = c.command;
  if (cmd == "spectral") require(c, "s");
  if (cmd == "rate") {
    const double step = real(c, "step");
    if (!(real(c, "s_lo") < real(c, "s_hi"))) throw ConfigError("'s_lo' must be below 's_hi'");
    if (!(step > 0.0 && step <= 0.05)) throw ConfigError("'step' must lie in (0, 0.05]");
  }
  if (cmd == "validate" && c.get<int>("max_word_len") < 1) throw ConfigError("'max_word_len' must be at least 1");
  if (cmd == "theory") {
    require(c, "n");
    const std::string f = c.get<std::string>("formula");
    require_one_of(f, {"upper", "lower", "llt", "changed"}, "formula");
    if (f == "changed") {
      require(c, "s");
      require(c, "t");
    } else if (c.has("s") == c.has("q")) {
      throw ConfigError("command 'theory' needs exactly one of 's' and 'q'");
    }
  }
  if (cmd == "estimate") {
    require(c, "n");
    require(c, "s");
    const std::string e = c.get<std::string>("estimator");
    require_one_of(e, {"importance", "llt", "changed"}, "estimator");
    if (e == "changed") require(c, "t");
  }
  if (cmd == "enumerate") {
    require(c, "n");
    if (c.has("threshold") == c.has("q")) throw ConfigError("command 'enumerate' needs exactly one of 'threshold' and 'q'");
  }
  if (cmd == "diagnose") {
    require(c, "diagnostic");
    require(c, "s");
    const std::string d = c.get<std::string>("diagnostic");
    require_one_of(d, {"regularity", "decay", "clt", "lyapunov", "cartan", "iwasawa"}, "diagnostic");
    if (d == "clt" || d == "lyapunov") require(c, "n");
    if (d == "cartan" || d == "iwasawa") require(c, "n_list");
  }
  if (cmd == "verify") {
    for (const auto& id : c.values.at("criteria")) {
      const int v = id.get<int>();
      if (v < 1 || v > kCriterionCount) throw ConfigError("no acceptance criterion " + std::to_string(v));
    }
  }
}

std::string config_hash(const RunConfig& c) {
  nlohmann::json key = c.values;
  key.erase("out");
  key.erase("workers");
  key["command"] = c.command;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(key.dump())));
  return buf;
}

namespace {

struct Output {
  nlohmann::json result;
  std::string csv;     ///< table for --format csv; key,value rows when empty
  std::string summary;
  bool pass = true;
};

MatrixModel load_model(const RunConfig& c) {
  const auto& m = c.values.at("model");
  if (m.is_object()) return MatrixModel::from_json(m);
  std::filesystem::path p = m.get<std::string>();
  if (p.is_relative()) p = c.base_dir / p;
  return MatrixModel::load(p);
}

SolverSettings settings_of(const RunConfig& c) {
  SolverSettings st;
  st.grid_n = c.get<int>("grid_n");
  st.tol = real(c, "tol");
  return st;
}

Sampling sampling_of(const RunConfig& c) {
  return {c.get<std::uint64_t>("samples"), c.get<std::uint64_t>("seed"), static_cast<unsigned>(c.get<int>("workers"))};
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Rate table covering the given tilts with room for the difference stencil.
RateFunction rate_for(const MatrixModel& model, const RunConfig& c, std::vector<double> tilts) {
  double lo = real(c, "s_lo"), hi = real(c, "s_hi");
  for (double s : tilts) {
    lo = std::min(lo, s - 0.05);
    hi = std::max(hi, s + 0.05);
  }
  lo = std::max(lo, kMinTilt);
  return build_rate(model, lo, hi, real(c, "step"), c.get<int>("grid_n"), real(c, "tol"),
                    static_cast<unsigned>(c.get<int>("workers")));
}

void require_proximal(const MatrixModel& model, const RunConfig& c) {
  if (c.get<bool>("allow_nonproximal")) return;
  const ValidationReport rep = validate_model(model, 1.0, real(c, "beta"), real(c, "eta"), c.get<int>("max_word_len"));
  if (!rep.proximal_witness) {
    throw DomainError("model has no proximal product up to word length " + std::to_string(c.get<int>("max_word_len")) +
                      "; theory needs one (override with --allow-nonproximal)");
  }
}

TheoremInput theorem_input(const RunConfig& c) {
  TheoremInput in;
  in.x = ProjPoint::from_angle(real(c, "x"));
  in.y = DualPoint::from_angle(real(c, "y"));
  in.n = c.get<int>("n");
  in.l = real(c, "l");
  in.a1 = real(c, "a1");
  in.a2 = real(c, "a2");
  return in;
}

Output cmd_validate(const RunConfig& c) {
  const MatrixModel model = load_model(c);
  const double s = c.has("s") ? real(c, "s") : 1.0;
  const ValidationReport rep = validate_model(model, s, real(c, "beta"), real(c, "eta"), c.get<int>("max_word_len"));
  Output out;
  out.result = rep.to_json();
  out.summary = "proximal witness " + (rep.proximal_witness ? *rep.proximal_witness : std::string("none")) +
                ", irreducibility heuristic " + (rep.irreducibility_pass ? "pass" : "fail");
  return out;
}

Output cmd_spectral(const RunConfig& c) {
  const MatrixModel model = load_model(c);
  const SpectralData d = solve_spectral(model, real(c, "s"), settings_of(c));
  Output out;
  out.result = d.to_json();
  if (model.dim() == 2) out.result["duality_residual"] = duality_residual(d);
  std::ostringstream csv;
  csv << "theta,r,nu,r_star,nu_star,pi\n";
  const ProjGrid grid = d.grid();
  for (int i = 0; i < d.n; ++i) {
    csv << fmt(grid.angle(i)) << ',' << fmt(d.r[i]) << ',' << fmt(d.nu[i]) << ',' << fmt(d.r_star[i]) << ','
        << fmt(d.nu_star[i]) << ',' << fmt(d.pi[i]) << '\n';
  }
  out.csv = csv.str();
  out.summary = "kappa(" + short_fmt(d.s) + ") = " + fmt(d.kappa);
  return out;
}

Output cmd_rate(const RunConfig& c) {
  const MatrixModel model = load_model(c);
  const RateFunction rate = build_rate(model, real(c, "s_lo"), real(c, "s_hi"), real(c, "step"), c.get<int>("grid_n"),
                                       real(c, "tol"), static_cast<unsigned>(c.get<int>("workers")));
  Output out;
  out.result = rate.to_json();
  out.csv = rate.to_csv();
  if (c.has("q")) {
    const LegendreResult lr = legendre(rate, real(c, "q"));
    out.result["legendre"] = {{"q", real(c, "q")}, {"lambda_star", lr.lambda_star}, {"s_of_q", lr.s_of_q}};
  }
  const auto [q_lo, q_hi] = rate.q_range();
  out.summary = "rate table on [" + short_fmt(rate.s_min()) + ", " + short_fmt(rate.s_max()) + "], q range [" +
                short_fmt(q_lo) + ", " + short_fmt(q_hi) + "]";
  return out;
}

Output cmd_theory(const RunConfig& c) {
  const MatrixModel model = load_model(c);
  require_proximal(model, c);
  const std::string formula = c.get<std::string>("formula");
  TheoremInput in = theorem_input(c);
  const SolverSettings st = settings_of(c);
  TheoryValue v;
  if (formula == "changed") {
    const double s = real(c, "s"), t = real(c, "t");
    const RateFunction rate = rate_for(model, c, {s, t});
    v = changed_measure_theory(solve_spectral(model, s, st), solve_spectral(model, t, st), rate, in);
  } else {
    std::optional<RateFunction> rate;
    double s = 0.0;
    if (c.has("s")) {
      s = real(c, "s");
      rate = rate_for(model, c, {s});
      in.s = s;
    } else {
      rate = rate_for(model, c, {});
      s = legendre(*rate, real(c, "q")).s_of_q;
      in.q = real(c, "q");
    }
    const SpectralData d = solve_spectral(model, s, st);
    if (formula == "upper") v = bahadur_rao_upper(d, *rate, in);
    if (formula == "lower") v = bahadur_rao_lower(d, *rate, in);
    if (formula == "llt") v = llt_theory(d, *rate, in);
  }
  Output out;
  out.result = v.to_json();
  out.summary = v.formula + " = " + fmt(v.value) + " (log " + short_fmt(v.log_value) + ")";
  return out;
}

Output cmd_estimate(const RunConfig& c) {
  const MatrixModel model = load_model(c);
  const std::string kind = c.get<std::string>("estimator");
  const double s = real(c, "s");
  const SolverSettings st = settings_of(c);
  const Sampling sm = sampling_of(c);
  TheoremInput in = theorem_input(c);
  in.s = s;
  const SpectralData d = solve_spectral(model, s, st);
  LDEstimate e;
  std::optional<TheoryValue> th;
  const bool theory_ok = c.get<bool>("allow_nonproximal") ||
                         validate_model(model, 1.0, real(c, "beta"), real(c, "eta"), c.get<int>("max_word_len"))
                             .proximal_witness.has_value();
  if (kind == "changed") {
    const double t = real(c, "t");
    const RateFunction rate = rate_for(model, c, {s, t});
    const SpectralData dt = solve_spectral(model, t, st);
    const Tail tail = c.has("tail") ? parse_tail(c.get<std::string>("tail")) : (t > s ? Tail::upper : Tail::lower);
    e = changed_measure_estimator(model, d, dt, rate, in.x, in.y, in.n, sm, tail);
    in.s.reset();
    if (theory_ok) th = changed_measure_theory(d, dt, rate, in);
  } else {
    const RateFunction rate = rate_for(model, c, {s});
    const double q = rate.lambda_prime(s);
    if (kind == "llt") {
      e = target_estimator(model, d, rate, in.x, in.y, in.n, q, in.l, {},
                           TabulatedFunction::indicator(in.a1, in.a2), sm);
      if (theory_ok) th = llt_theory(d, rate, in);
    } else {
      const Tail tail = c.has("tail") ? parse_tail(c.get<std::string>("tail")) : (s > 0 ? Tail::upper : Tail::lower);
      if (in.l == 0.0) {
        e = importance_estimator(model, d, rate, in.x, in.y, in.n, q, sm, tail);
      } else {
        const double inf = std::numeric_limits<double>::infinity();
        e = target_estimator(model, d, rate, in.x, in.y, in.n, q, in.l, {},
                             tail == Tail::upper ? TabulatedFunction::indicator(0.0, inf)
                                                 : TabulatedFunction::indicator(-inf, 0.0),
                             sm);
      }
      if (theory_ok) th = tail == Tail::upper ? bahadur_rao_upper(d, rate, in) : bahadur_rao_lower(d, rate, in);
    }
  }
  if (th) e.set_theory(th->value);
  Output out;
  out.result = {{"estimator", kind}, {"estimate", e.to_json()}, {"theory", th ? th->to_json() : nlohmann::json()}};
  out.summary = kind + " estimate " + short_fmt(e.value) + " +- " + short_fmt(e.std_error);
  if (e.ratio) out.summary += ", ratio to theory " + short_fmt(*e.ratio);
  return out;
}

Output cmd_enumerate(const RunConfig& c) {
  const MatrixModel model = load_model(c);
  const int n = c.get<int>("n");
  const Tail tail = c.has("tail") ? parse_tail(c.get<std::string>("tail")) : Tail::upper;
  const double threshold = c.has("threshold") ? real(c, "threshold") : n * real(c, "q");
  std::optional<SpectralData> tilt;
  if (c.has("s")) tilt = solve_spectral(model, real(c, "s"), settings_of(c));
  const ProjPoint x = ProjPoint::from_angle(real(c, "x"));
  const DualPoint f = DualPoint::from_angle(real(c, "y"));
  const double p = enumerate_exact(model, x, f, n, threshold, tail, tilt ? &*tilt : nullptr);
  Output out;
  out.result = {{"probability", p}, {"threshold", threshold}, {"tail", to_string(tail)}, {"words", std::pow(model.size(), n)}};
  out.summary = "P = " + fmt(p);
  return out;
}

Output cmd_diagnose(const RunConfig& c) {
  const MatrixModel model = load_model(c);
  const std::string kind = c.get<std::string>("diagnostic");
  const double s = real(c, "s");
  const SpectralData d = solve_spectral(model, s, settings_of(c));
  const Sampling sm = sampling_of(c);
  const ProjPoint x = ProjPoint::from_angle(real(c, "x"));
  const DualPoint y = DualPoint::from_angle(real(c, "y"));
  Output out;
  if (kind == "regularity" || kind == "decay") {
    DecayProfile p;
    if (kind == "regularity") {
      std::vector<double> r_grid;
      if (c.has("r_grid")) {
        r_grid = c.get<std::vector<double>>("r_grid");
      } else {
        for (int k = 1; k <= 12; ++k) r_grid.push_back(std::pow(0.5, k));
      }
      p = regularity_profile(model, d, y, r_grid, sm);
    } else {
      const int n = c.has("n") ? c.get<int>("n") : 60;
      p = regularity_decay(model, d, x, y, real(c, "epsilon"), n, c.get<int>("k_max"), sm);
    }
    out.result = p.to_json();
    out.csv = p.to_csv();
    out.pass = !p.censored && p.ci_lo > 0.0;
    out.summary = (p.censored ? std::string("censored") : "fitted rate " + short_fmt(p.fitted_rate) + " CI [" +
                                                              short_fmt(p.ci_lo) + ", " + short_fmt(p.ci_hi) + "]");
  } else if (kind == "clt") {
    const RateFunction rate = rate_for(model, c, {s});
    const CltResult r = clt_diagnostic(model, d, rate, x, y, c.get<int>("n"), sm);
    out.result = r.to_json();
    out.pass = r.mean_err <= 3.0 * r.mean_err_se;
    out.summary = "KS " + short_fmt(r.ks_distance) + ", mean_err " + short_fmt(r.mean_err) + " (" +
                  short_fmt(r.mean_err / r.mean_err_se) + " se)";
  } else if (kind == "lyapunov") {
    const LyapunovResult r = lyapunov_spectrum(model, d, c.get<int>("n"), sm, x);
    out.result = r.to_json();
    out.pass = r.gap.value - 1.96 * r.gap.std_error > 0.0;
    out.summary = "lambda1 " + short_fmt(r.lambda1.value) + ", lambda2 " + short_fmt(r.lambda2.value) + ", gap " +
                  short_fmt(r.gap.value) + " +- " + short_fmt(r.gap.std_error);
  } else if (kind == "cartan") {
    const CartanTable t = cartan_convergence(model, d, x, c.get<std::vector<int>>("n_list"), sm);
    out.result = t.to_json();
    out.csv = t.to_csv();
    // decay of a22 / a11 needs a slope clearly below zero
    out.pass = t.slope.value + 3.0 * t.slope.std_error < 0.0;
    out.summary = "log(a22/a11) slope " + short_fmt(t.slope.value) + " +- " + short_fmt(t.slope.std_error);
  } else {
    const IwasawaTable t = iwasawa_convergence(model, d, c.get<std::vector<int>>("n_list"), real(c, "alpha"), sm, x);
    out.result = t.to_json();
    out.csv = t.to_csv();
    out.pass = t.majorant_violations == 0 && t.ci_hi < 0.0;
    out.summary = "moment log-slope " + short_fmt(t.log_slope) + " CI [" + short_fmt(t.ci_lo) + ", " +
                  short_fmt(t.ci_hi) + "], majorant violations " + std::to_string(t.majorant_violations);
  }
  return out;
}

Output cmd_verify(const RunConfig& c) {
  AcceptanceOptions options;
  if (c.has("seed")) options.seed = c.get<std::uint64_t>("seed");
  options.workers = static_cast<unsigned>(c.get<int>("workers"));
  options.only = c.get<std::vector<int>>("criteria");
  Output out;
  nlohmann::json list = nlohmann::json::array();
  std::ostringstream csv;
  csv << "id,name,pass,detail\n";
  int failed = 0;
  const auto results = run_acceptance(options, [&](const CriterionResult& r) {
    std::printf("%s\n", r.line().c_str());
    std::fflush(stdout);
  });
  for (const auto& r : results) {
    nlohmann::json j = r.to_json();
    j.erase("seconds");  // keeps verdict files reproducible
    list.push_back(j);
    csv << r.id << ",\"" << r.name << "\"," << (r.pass ? "pass" : "fail") << ",\"" << r.detail << "\"\n";
    if (!r.pass) ++failed;
  }
  out.result = {{"seed", options.seed}, {"criteria", list}, {"passed", results.size() - failed}, {"failed", failed}};
  out.csv = csv.str();
  out.pass = failed == 0;
  out.summary = std::to_string(results.size() - failed) + " of " + std::to_string(results.size()) + " criteria pass";
  return out;
}

std::string flat_csv(const nlohmann::json& result) {
  std::ostringstream out;
  out << "key,value\n";
  for (const auto& [k, v] : result.items()) {
    if (v.is_primitive()) out << k << ',' << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
  }
  return out.str();
}

std::filesystem::path write_output(const RunConfig& c, const MatrixModel* model, const Output& out) {
  const std::filesystem::path dir = c.get<std::string>("out");
  std::filesystem::create_directories(dir);
  const std::string stem = c.command + "-" + config_hash(c);
  nlohmann::json config = c.values;
  config["command"] = c.command;
  if (c.get<std::string>("format") == "json") {
    nlohmann::json doc{{"version", version_string()}, {"command", c.command}, {"config", config}, {"result", out.result}};
    if (model) doc["model_definition"] = model->to_json();
    doc["pass"] = out.pass;
    const auto path = dir / (stem + ".json");
    std::ofstream f(path);
    f << doc.dump(2) << '\n';
    if (!f) throw ConfigError("cannot write " + path.string());
    return path;
  }
  const auto path = dir / (stem + ".csv");
  std::ofstream f(path);
  f << "# " << version_string() << '\n' << "# config: " << config.dump() << '\n';
  if (model) f << "# model: " << model->to_json().dump() << '\n';
  f << (out.csv.empty() ? flat_csv(out.result) : out.csv);
  if (!f) throw ConfigError("cannot write " + path.string());
  return path;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Large deviation toolkit for products of random matrices", "prmld"};
  app.set_version_flag("--version", version_string());
  std::string command;
  std::string config_path;
  app.add_option("command", command, "validate, spectral, rate, theory, estimate, verify, diagnose or enumerate")
      ->required();
  app.add_option("--config", config_path, "JSON config file; flags override its keys");
  std::map<std::string, std::string> scalars;
  std::map<std::string, std::vector<std::string>> lists;
  bool allow_nonproximal = false;
  for (const auto& k : schema()) {
    std::string flag = std::string("--") + k.name;
    std::replace(flag.begin(), flag.end(), '_', '-');
    if (k.kind == Kind::flag) {
      app.add_flag(flag, allow_nonproximal, k.help);
    } else if (k.kind == Kind::int_list || k.kind == Kind::real_list) {
      app.add_option(flag, lists[k.name], k.help)->delimiter(',');
    } else {
      app.add_option(flag, scalars[k.name], k.help);
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "prmld: %s\n", e.what());
    return 1;
  }

  try {
    if (std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end()) {
      throw ConfigError("unknown command '" + command + "'");
    }
    RunConfig c = config_path.empty() ? default_config() : load_config(config_path);
    if (!c.command.empty() && c.command != command) {
      throw ConfigError("config is for command '" + c.command + "', not '" + command + "'");
    }
    c.command = command;
    nlohmann::json flags = nlohmann::json::object();
    for (const auto& k : schema()) {
      std::string flag = std::string("--") + k.name;
      std::replace(flag.begin(), flag.end(), '_', '-');
      if (app.count(flag) == 0) continue;
      if (k.kind == Kind::flag) flags[k.name] = allow_nonproximal;
      else if (k.kind == Kind::int_list || k.kind == Kind::real_list) flags[k.name] = lists[k.name];
      else flags[k.name] = scalars[k.name];
    }
    // model paths given on the command line are relative to the working directory
    if (flags.contains("model")) {
      flags["model"] = std::filesystem::absolute(flags["model"].get<std::string>()).lexically_normal().string();
    }
    apply_settings(c, flags);
    check_config(c);

    Output out;
    if (command == "validate") out = cmd_validate(c);
    else if (command == "spectral") out = cmd_spectral(c);
    else if (command == "rate") out = cmd_rate(c);
    else if (command == "theory") out = cmd_theory(c);
    else if (command == "estimate") out = cmd_estimate(c);
    else if (command == "enumerate") out = cmd_enumerate(c);
    else if (command == "diagnose") out = cmd_diagnose(c);
    else out = cmd_verify(c);

    std::optional<MatrixModel> model;
    if (c.has("model")) model = load_model(c);
    const auto path = write_output(c, model ? &*model : nullptr, out);
    std::printf("%s: %s -> %s\n", command.c_str(), out.summary.c_str(), path.string().c_str());
    return out.pass ? 0 : 2;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "prmld: config error: %s\n", e.what());
  } catch (const InvalidModel& e) {
    std::fprintf(stderr, "prmld: invalid model: %s\n", e.what());
  } catch (const ConvergenceError& e) {
    std::fprintf(stderr, "prmld: solver failure: %s\n", e.what());
  } catch (const BudgetError& e) {
    std::fprintf(stderr, "prmld: enumeration budget: %s\n", e.what());
  } catch (const Error& e) {
    std::fprintf(stderr, "prmld: %s\n", e.what());
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "prmld: config error: %s\n", e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "prmld: %s\n", e.what());
  }
  return 1;
}

}  // namespace prm
