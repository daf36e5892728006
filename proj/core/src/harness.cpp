#include "nymp/harness.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string_view>
#include <tuple>

#include "nymp/error_analysis.hpp"
#include "nymp/errors.hpp"
#include "nymp/float_format.hpp"
#include "nymp/lmp.hpp"
#include "nymp/matrix_market.hpp"
#include "nymp/nystrom.hpp"
#include "nymp/pcg.hpp"
#include "nymp/problems.hpp"

namespace nymp {

namespace {

std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, sep)) out.push_back(trim(part));
  return out;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

double to_double(const std::string& s, const std::string& what) {
  size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw config_error("bad " + what + " value '" + s + "'");
  }
  if (pos != s.size())
    throw config_error("bad " + what + " value '" + s + "'");
  return v;
}

long long to_int(const std::string& s, const std::string& what) {
  size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    throw config_error("bad " + what + " value '" + s + "'");
  }
  if (pos != s.size())
    throw config_error("bad " + what + " value '" + s + "'");
  return v;
}

std::string sanitize_name(std::string s) {
  for (char& c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' &&
        c != '-' && c != '.')
      c = '_';
  return s;
}

std::map<std::string, std::string> parse_kv_list(
    const std::vector<std::string>& parts, const std::string& context) {
  std::map<std::string, std::string> kv;
  for (const auto& p : parts) {
    auto eq = p.find('=');
    if (eq == std::string::npos)
      throw config_error(context + ": expected key=value, got '" + p + "'");
    std::string key = trim(p.substr(0, eq));
    std::string val = trim(p.substr(eq + 1));
    if (key.empty() || val.empty())
      throw config_error(context + ": expected key=value, got '" + p + "'");
    if (!kv.emplace(key, val).second)
      throw config_error(context + ": duplicate key '" + key + "'");
  }
  return kv;
}

SyntheticSpec parse_synthetic(const std::string& kind_name,
                              const std::string& rest) {
  SyntheticSpec spec;
  std::string decay_key;
  if (kind_name == "expdecay") {
    spec.kind = SyntheticKind::ExpDecay;
    decay_key = "q";
  } else if (kind_name == "polydecay") {
    spec.kind = SyntheticKind::PolyDecay;
    decay_key = "p";
  } else {
    spec.kind = SyntheticKind::PsdNoise;
    decay_key = "xi";
  }
  auto kv = parse_kv_list(split(rest, ','), kind_name + " spec");
  for (const auto& [key, val] : kv) {
    if (key == "n")
      spec.n = static_cast<int>(to_int(val, "n"));
    else if (key == "r")
      spec.r = static_cast<int>(to_int(val, "r"));
    else if (key == "beta")
      spec.beta = to_double(val, "beta");
    else if (key == "seed")
      spec.seed = static_cast<std::uint64_t>(to_int(val, "seed"));
    else if (key == decay_key)
      spec.decay = to_double(val, decay_key);
    else
      throw config_error(kind_name + " spec: unknown key '" + key + "'");
  }
  return spec;
}

}  // namespace

ProblemRef parse_problem_ref(const std::string& token) {
  auto colon = token.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == token.size())
    throw config_error("problem spec '" + token +
                       "' needs a kind prefix (builtin:, mtx:, kernel:, "
                       "expdecay:, polydecay:, psdnoise:)");
  std::string kind = token.substr(0, colon);
  std::string rest = trim(token.substr(colon + 1));

  ProblemRef ref;
  if (kind == "builtin") {
    builtin_problem(rest);  // validates the name
    ref.name = rest;
    ref.source = ProblemRef::Builtin{rest};
  } else if (kind == "mtx") {
    ref.name = sanitize_name(std::filesystem::path(rest).stem().string());
    ref.source = ProblemRef::MtxFile{rest};
  } else if (kind == "kernel") {
    auto parts = split(rest, ',');
    if (parts.empty() || parts[0].empty())
      throw config_error("kernel spec '" + token + "' needs a CSV path");
    std::string path = parts[0];
    parts.erase(parts.begin());
    auto kv = parse_kv_list(parts, "kernel spec");
    auto it = kv.find("sigma");
    if (it == kv.end())
      throw config_error("kernel spec '" + token + "' needs sigma=<value>");
    kv.erase(it->first);
    if (!kv.empty())
      throw config_error("kernel spec: unknown key '" + kv.begin()->first +
                         "'");
    double sigma = to_double(it->second, "sigma");
    ref.name =
        sanitize_name(std::filesystem::path(path).stem().string()) +
        "_kernel";
    ref.source = ProblemRef::KernelCsv{path, sigma};
  } else if (kind == "expdecay" || kind == "polydecay" ||
             kind == "psdnoise") {
    ref.name = sanitize_name(token);
    ref.source = parse_synthetic(kind, rest);
  } else {
    throw config_error("unknown problem kind '" + kind + "' in '" + token +
                       "'");
  }
  return ref;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file '" + path + "'");

  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& what) -> void {
    throw config_error(path + ":" + std::to_string(lineno) + ": " + what);
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    std::string stripped = trim(line);
    if (stripped.empty()) continue;
    auto eq = stripped.find('=');
    if (eq == std::string::npos) fail("expected 'key = value'");
    std::string key = trim(stripped.substr(0, eq));
    std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) fail("missing key");
    if (value.empty()) fail("missing value for key '" + key + "'");

    try {
      if (key == "problem") {
        cfg.problems.push_back(parse_problem_ref(value));
      } else if (key == "k") {
        for (const auto& tok : split_ws(value)) {
          long long k = to_int(tok, "k");
          if (k < 1) throw config_error("k must be >= 1, got " + tok);
          cfg.ks.push_back(static_cast<int>(k));
        }
      } else if (key == "format") {
        for (const auto& tok : split_ws(value)) {
          builtin_format(tok);  // validates the name
          cfg.formats.push_back(tok);
        }
      } else if (key == "mu") {
        for (const auto& tok : split_ws(value)) {
          double mu = to_double(tok, "mu");
          if (mu < 0) throw config_error("mu must be >= 0, got " + tok);
          cfg.mus.push_back(mu);
        }
      } else if (key == "seed") {
        for (const auto& tok : split_ws(value))
          cfg.seeds.push_back(
              static_cast<std::uint64_t>(to_int(tok, "seed")));
      } else if (key == "oversampling") {
        long long l = to_int(value, "oversampling");
        if (l < 0)
          throw config_error("oversampling must be >= 0, got " + value);
        cfg.oversampling = static_cast<int>(l);
      } else if (key == "mode") {
        cfg.mode = matmul_mode_from_string(value);
      } else if (key == "output_dir") {
        cfg.output_dir = value;
      } else if (key == "rhs_seed") {
        cfg.rhs_seed = static_cast<std::uint64_t>(to_int(value, "rhs_seed"));
      } else if (key == "pcg_tol") {
        double tol = to_double(value, "pcg_tol");
        if (tol <= 0) throw config_error("pcg_tol must be > 0");
        cfg.pcg_tol = tol;
      } else {
        throw config_error("unknown key '" + key + "'");
      }
    } catch (const config_error& e) {
      fail(e.what());
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  }
  return cfg;
}

namespace {

Eigen::MatrixXd load_csv_features(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open feature CSV '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    std::replace(stripped.begin(), stripped.end(), ',', ' ');
    std::vector<double> row;
    for (const auto& tok : split_ws(stripped)) {
      try {
        row.push_back(to_double(tok, "feature"));
      } catch (const config_error& e) {
        throw config_error(path + ":" + std::to_string(lineno) + ": " +
                           e.what());
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw config_error(path + ":" + std::to_string(lineno) +
                         ": inconsistent column count");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw config_error(path + ": no feature rows");
  Eigen::MatrixXd f(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j)
      f(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
  return f;
}

}  // namespace

SpdMatrix load_problem(const ProblemRef& ref) {
  return std::visit(
      [&](const auto& src) -> SpdMatrix {
        using T = std::decay_t<decltype(src)>;
        if constexpr (std::is_same_v<T, ProblemRef::Builtin>) {
          return make_builtin(src.id);
        } else if constexpr (std::is_same_v<T, ProblemRef::MtxFile>) {
          return load_matrix_market(src.path);
        } else if constexpr (std::is_same_v<T, ProblemRef::KernelCsv>) {
          return gen_gaussian_kernel(load_csv_features(src.path), src.sigma);
        } else {
          return gen_synthetic(src);
        }
      },
      ref.source);
}

namespace {

struct LoadedProblem {
  std::string name;
  SpdMatrix a;
  std::vector<int> ks;
};

std::vector<std::uint64_t> effective_seeds(const ExperimentConfig& cfg) {
  if (!cfg.seeds.empty()) return cfg.seeds;
  std::vector<std::uint64_t> s(10);
  for (int i = 0; i < 10; ++i) s[i] = static_cast<std::uint64_t>(i + 1);
  return s;
}

std::vector<LoadedProblem> load_grid(const ExperimentConfig& cfg) {
  if (cfg.problems.empty()) throw config_error("config declares no problems");
  if (cfg.formats.empty()) throw config_error("config declares no formats");
  std::vector<LoadedProblem> out;
  for (const auto& ref : cfg.problems) {
    LoadedProblem lp{ref.name, load_problem(ref), cfg.ks};
    if (lp.ks.empty()) {
      if (const auto* b = std::get_if<ProblemRef::Builtin>(&ref.source))
        lp.ks = builtin_problem(b->id).ks;
      else
        throw config_error("problem '" + ref.name +
                           "' needs an explicit k list");
    }
    for (int k : lp.ks)
      if (k < 1 || k + cfg.oversampling > lp.a.n())
        throw config_error(
            "k=" + std::to_string(k) + " with oversampling " +
            std::to_string(cfg.oversampling) + " is out of range for '" +
            lp.name + "' (n=" + std::to_string(lp.a.n()) + ")");
    out.push_back(std::move(lp));
  }
  return out;
}

// The half-precision family is only exercised when the spectrum fits its
// range with headroom; cells outside it are recorded as skipped, matching
// how such problems are conventionally excluded from half-precision runs.
bool preskip_format(const FloatFormat& fmt, double norm2) {
  return !fmt.is_working_precision() && fmt.x_max < 1e5 && norm2 >= 1e5;
}

std::string skip_note(const FloatFormat& fmt, double norm2) {
  char buf[128];
  std::snprintf(buf, sizeof(buf),
                "skipped: ||A||_2 = %.3g >= 1e5 is out of %s range", norm2,
                fmt.name.c_str());
  return buf;
}

std::string agg_mu_key(const std::optional<double>& mu) {
  if (!mu) return "-";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", *mu);
  return buf;
}

using DoubleField = std::optional<double> ResultRow::*;
constexpr DoubleField kDoubleFields[] = {
    &ResultRow::total_error,   &ResultRow::finite_error,
    &ResultRow::proxy,         &ResultRow::finite_bound,
    &ResultRow::expected_bound, &ResultRow::heuristic_ratio,
    &ResultRow::heuristic_threshold, &ResultRow::kappa_unprec,
    &ResultRow::kappa_prec,    &ResultRow::b_low,
    &ResultRow::b_upp,         &ResultRow::b_uppspd,
    &ResultRow::b_low_est,     &ResultRow::b_upp_est,
    &ResultRow::b_uppspd_est,  &ResultRow::e_norm,
    &ResultRow::eps_norm,      &ResultRow::lambda_k_hat,
    &ResultRow::iters,         &ResultRow::iters_unprec,
};

using BoolField = std::optional<bool> ResultRow::*;
constexpr BoolField kBoolFields[] = {
    &ResultRow::heuristic_flag,
    &ResultRow::converged,
};

std::vector<AggregateRow> aggregate(const std::vector<ResultRow>& rows) {
  std::map<std::tuple<std::string, int, std::string, std::string>, size_t>
      index;
  std::vector<AggregateRow> aggs;
  struct Acc {
    double sum[std::size(kDoubleFields)] = {};
    int cnt[std::size(kDoubleFields)] = {};
    std::optional<bool> agree[std::size(kBoolFields)];
    bool conflict[std::size(kBoolFields)] = {};
  };
  std::vector<Acc> accs;

  for (const auto& row : rows) {
    auto key = std::make_tuple(row.problem, row.k, row.up,
                               agg_mu_key(row.mu));
    auto [it, fresh] = index.emplace(key, aggs.size());
    if (fresh) {
      AggregateRow agg;
      agg.problem = row.problem;
      agg.k = row.k;
      agg.up = row.up;
      agg.mu = row.mu;
      agg.means.problem = row.problem;
      agg.means.n = row.n;
      agg.means.k = row.k;
      agg.means.up = row.up;
      agg.means.mu = row.mu;
      aggs.push_back(std::move(agg));
      accs.emplace_back();
    }
    if (row.status != "ok") continue;
    AggregateRow& agg = aggs[it->second];
    Acc& acc = accs[it->second];
    ++agg.count;
    for (size_t f = 0; f < std::size(kDoubleFields); ++f) {
      if (const auto& v = row.*kDoubleFields[f]) {
        acc.sum[f] += *v;
        ++acc.cnt[f];
      }
    }
    for (size_t f = 0; f < std::size(kBoolFields); ++f) {
      if (const auto& v = row.*kBoolFields[f]) {
        if (!acc.agree[f])
          acc.agree[f] = *v;
        else if (*acc.agree[f] != *v)
          acc.conflict[f] = true;
      }
    }
  }
  for (size_t i = 0; i < aggs.size(); ++i) {
    for (size_t f = 0; f < std::size(kDoubleFields); ++f)
      if (accs[i].cnt[f] > 0)
        aggs[i].means.*kDoubleFields[f] = accs[i].sum[f] / accs[i].cnt[f];
    for (size_t f = 0; f < std::size(kBoolFields); ++f)
      if (accs[i].agree[f] && !accs[i].conflict[f])
        aggs[i].means.*kBoolFields[f] = accs[i].agree[f];
  }
  return aggs;
}

// Fills the a-priori estimate columns that do not depend on the computed
// approximation.  The gamma-based columns require n*u_p < 1.
void fill_apriori(ResultRow& row, const SpdMatrix& a, int k,
                  const FloatFormat& fmt) {
  const int n = a.n();
  if (gamma_factors(n, fmt).valid) {
    row.proxy = finite_error_proxy(n, a.norm2(), fmt);
    try {
      row.finite_bound = finite_term_bound(a, k, fmt).term;
    } catch (const numeric_error&) {
      // rank-deficient A_k; leave the column empty
    }
  } else if (row.note.empty()) {
    row.note = "n*u_p >= 1: accumulation bounds do not apply";
  }
  if (k >= 4) row.expected_bound = expected_exact_error_bound(a.spectrum(), k);
  if (k < n) {
    HeuristicCheck h = heuristic_check(a.spectrum(), k, fmt);
    row.heuristic_ratio = h.ratio;
    row.heuristic_threshold = h.threshold;
    row.heuristic_flag = h.flag;
  }
}

}  // namespace

ExperimentReport run_approx_experiment(const ExperimentConfig& cfg) {
  ExperimentReport report;
  report.kind = ExperimentReport::Kind::Approx;
  report.config = cfg;

  const auto problems = load_grid(cfg);
  const auto seeds = effective_seeds(cfg);
  const FloatFormat ref_fmt = builtin_format("fp64");

  for (const auto& prob : problems) {
    const SpdMatrix& a = prob.a;
    const double norm2 = a.norm2();

    // fp64 reference per (k, seed), shared across formats.
    std::map<std::pair<int, std::uint64_t>, NystromApprox> refs;
    auto reference = [&](int k, std::uint64_t seed) -> const NystromApprox& {
      auto key = std::make_pair(k, seed);
      auto it = refs.find(key);
      if (it == refs.end())
        it = refs
                 .emplace(key, nystrom_approx(a, k, cfg.oversampling,
                                              ref_fmt, cfg.mode, seed))
                 .first;
      return it->second;
    };

    for (int k : prob.ks) {
      for (const auto& fmt_name : cfg.formats) {
        const FloatFormat fmt = builtin_format(fmt_name);
        for (std::uint64_t seed : seeds) {
          ResultRow row;
          row.problem = prob.name;
          row.n = a.n();
          row.k = k;
          row.up = fmt_name;
          row.seed = seed;
          if (preskip_format(fmt, norm2)) {
            row.status = "skipped";
            row.note = skip_note(fmt, norm2);
            report.rows.push_back(std::move(row));
            continue;
          }
          try {
            const NystromApprox& ref = reference(k, seed);
            NystromApprox approx =
                fmt.is_working_precision()
                    ? ref
                    : nystrom_approx(a, k, cfg.oversampling, fmt, cfg.mode,
                                     seed);
            ApproxErrors errs = approx_errors(a, approx, &ref);
            row.total_error = errs.total;
            row.finite_error = errs.finite.value();
            fill_apriori(row, a, k, fmt);
          } catch (const std::exception& e) {
            row.status = "error";
            row.note = e.what();
          }
          report.rows.push_back(std::move(row));
        }
      }
    }
  }
  report.aggregates = aggregate(report.rows);
  return report;
}

ExperimentReport run_precond_experiment(const ExperimentConfig& cfg) {
  ExperimentReport report;
  report.kind = ExperimentReport::Kind::Precond;
  report.config = cfg;

  const auto problems = load_grid(cfg);
  const auto seeds = effective_seeds(cfg);
  const std::vector<double> mus =
      cfg.mus.empty() ? std::vector<double>{0.0, 0.1, 0.5, 1.0} : cfg.mus;
  const FloatFormat ref_fmt = builtin_format("fp64");

  for (const auto& prob : problems) {
    const SpdMatrix& a = prob.a;
    const int n = a.n();
    const double norm2 = a.norm2();
    const Eigen::VectorXd b = rhs_uniform(n, cfg.rhs_seed);

    PcgConfig base;
    base.tol = cfg.pcg_tol;

    // Unpreconditioned baseline per mu (independent of k, format, seed).
    std::map<double, PcgResult> unprec;
    auto unprec_for = [&](double mu) -> const PcgResult& {
      auto it = unprec.find(mu);
      if (it == unprec.end()) {
        PcgConfig c = base;
        c.mu = mu;
        it = unprec.emplace(mu, pcg_solve(a, b, nullptr, c)).first;
      }
      return it->second;
    };

    // fp64 reference and its exact-error norm per (k, seed).
    struct RefCell {
      NystromApprox approx;
      double e_norm;
    };
    std::map<std::pair<int, std::uint64_t>, RefCell> refs;
    auto reference = [&](int k, std::uint64_t seed) -> const RefCell& {
      auto key = std::make_pair(k, seed);
      auto it = refs.find(key);
      if (it == refs.end()) {
        NystromApprox ap =
            nystrom_approx(a, k, cfg.oversampling, ref_fmt, cfg.mode, seed);
        double e = spectral_norm(a.entries() - reconstruct(ap).entries());
        it = refs.emplace(key, RefCell{std::move(ap), e}).first;
      }
      return it->second;
    };

    // Low-precision approximation and its finite-error norm per
    // (k, format, seed), reused across the mu grid.
    struct SketchCell {
      NystromApprox approx;
      double eps_norm;
    };
    std::map<std::tuple<int, std::string, std::uint64_t>, SketchCell>
        sketches;
    auto sketch = [&](int k, const std::string& fmt_name,
                      const FloatFormat& fmt,
                      std::uint64_t seed) -> const SketchCell& {
      auto key = std::make_tuple(k, fmt_name, seed);
      auto it = sketches.find(key);
      if (it == sketches.end()) {
        const RefCell& ref = reference(k, seed);
        NystromApprox ap =
            fmt.is_working_precision()
                ? ref.approx
                : nystrom_approx(a, k, cfg.oversampling, fmt, cfg.mode,
                                 seed);
        ApproxErrors errs = approx_errors(a, ap, &ref.approx);
        it = sketches
                 .emplace(key, SketchCell{std::move(ap),
                                          errs.finite.value()})
                 .first;
      }
      return it->second;
    };

    for (int k : prob.ks) {
      for (const auto& fmt_name : cfg.formats) {
        const FloatFormat fmt = builtin_format(fmt_name);
        for (double mu : mus) {
          for (std::uint64_t seed : seeds) {
            ResultRow row;
            row.problem = prob.name;
            row.n = n;
            row.k = k;
            row.up = fmt_name;
            row.seed = seed;
            row.mu = mu;
            if (preskip_format(fmt, norm2)) {
              row.status = "skipped";
              row.note = skip_note(fmt, norm2);
              report.rows.push_back(std::move(row));
              continue;
            }
            try {
              const RefCell& ref = reference(k, seed);
              const SketchCell& cell = sketch(k, fmt_name, fmt, seed);
              LmpPreconditioner p =
                  LmpPreconditioner::build(cell.approx, mu);
              row.lambda_k_hat = p.lambda_k_hat();
              row.kappa_prec = measured_condition_number(a, p);

              CondReport meas =
                  cond_bounds(a, p, ref.e_norm, cell.eps_norm, false);
              row.kappa_unprec = meas.kappa_unprec;
              row.b_low = meas.b_low;
              row.b_upp = meas.b_upp;
              row.b_uppspd = meas.b_uppspd;
              row.e_norm = ref.e_norm;
              row.eps_norm = cell.eps_norm;

              if (k >= 4 && gamma_factors(n, fmt).valid) {
                CondReport est = cond_bounds(
                    a, p, expected_exact_error_bound(a.spectrum(), k),
                    finite_error_proxy(n, norm2, fmt), true);
                row.b_low_est = est.b_low;
                row.b_upp_est = est.b_upp;
                row.b_uppspd_est = est.b_uppspd;
              }

              PcgConfig pc = base;
              pc.mu = mu;
              PcgResult pr = pcg_solve(a, b, &p, pc);
              row.iters = pr.iterations;
              row.converged = pr.converged;
              const PcgResult& ur = unprec_for(mu);
              row.iters_unprec = ur.iterations;
            } catch (const std::exception& e) {
              row.status = "error";
              row.note = e.what();
            }
            report.rows.push_back(std::move(row));
          }
        }
      }
    }
  }
  report.aggregates = aggregate(report.rows);
  return report;
}

namespace {

std::string csv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_opt(const std::optional<double>& v) {
  return v ? csv_num(*v) : std::string();
}

std::string csv_opt(const std::optional<bool>& v) {
  return v ? (*v ? "1" : "0") : std::string();
}

std::string csv_note(std::string s) {
  for (char& c : s) {
    if (c == ',') c = ';';
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

constexpr const char* kMetricHeader =
    "total_error,finite_error,proxy,finite_bound,expected_bound,"
    "heuristic_ratio,heuristic_threshold,heuristic_flag,kappa_unprec,"
    "kappa_prec,b_low,b_upp,b_uppspd,b_low_est,b_upp_est,b_uppspd_est,"
    "e_norm,eps_norm,lambda_k_hat,iters,iters_unprec,converged";

void append_metrics(std::string& out, const ResultRow& r) {
  out += csv_opt(r.total_error);
  out += ',';
  out += csv_opt(r.finite_error);
  out += ',';
  out += csv_opt(r.proxy);
  out += ',';
  out += csv_opt(r.finite_bound);
  out += ',';
  out += csv_opt(r.expected_bound);
  out += ',';
  out += csv_opt(r.heuristic_ratio);
  out += ',';
  out += csv_opt(r.heuristic_threshold);
  out += ',';
  out += csv_opt(r.heuristic_flag);
  out += ',';
  out += csv_opt(r.kappa_unprec);
  out += ',';
  out += csv_opt(r.kappa_prec);
  out += ',';
  out += csv_opt(r.b_low);
  out += ',';
  out += csv_opt(r.b_upp);
  out += ',';
  out += csv_opt(r.b_uppspd);
  out += ',';
  out += csv_opt(r.b_low_est);
  out += ',';
  out += csv_opt(r.b_upp_est);
  out += ',';
  out += csv_opt(r.b_uppspd_est);
  out += ',';
  out += csv_opt(r.e_norm);
  out += ',';
  out += csv_opt(r.eps_norm);
  out += ',';
  out += csv_opt(r.lambda_k_hat);
  out += ',';
  out += csv_opt(r.iters);
  out += ',';
  out += csv_opt(r.iters_unprec);
  out += ',';
  out += csv_opt(r.converged);
}

void write_file(const std::filesystem::path& path,
                const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw config_error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw config_error("write failed for '" + path.string() + "'");
}

}  // namespace

std::string emit_csv(const ExperimentReport& report, const std::string& dir) {
  std::string outdir = dir;
  if (const char* env = std::getenv("NYSTROM_MP_OUTDIR"); env && *env)
    outdir = env;
  std::error_code ec;
  std::filesystem::create_directories(outdir, ec);
  if (ec)
    throw config_error("cannot create output directory '" + outdir +
                       "': " + ec.message());

  std::string rows;
  rows += "status,problem,n,k,up,seed,mu,";
  rows += kMetricHeader;
  rows += ",note\n";
  for (const ResultRow& r : report.rows) {
    rows += r.status;
    rows += ',';
    rows += r.problem;
    rows += ',';
    rows += std::to_string(r.n);
    rows += ',';
    rows += std::to_string(r.k);
    rows += ',';
    rows += r.up;
    rows += ',';
    rows += std::to_string(r.seed);
    rows += ',';
    rows += csv_opt(r.mu);
    rows += ',';
    append_metrics(rows, r);
    rows += ',';
    rows += csv_note(r.note);
    rows += '\n';
  }
  write_file(std::filesystem::path(outdir) / "rows.csv", rows);

  std::string aggs;
  aggs += "problem,n,k,up,mu,count,";
  aggs += kMetricHeader;
  aggs += '\n';
  for (const AggregateRow& g : report.aggregates) {
    aggs += g.problem;
    aggs += ',';
    aggs += std::to_string(g.means.n);
    aggs += ',';
    aggs += std::to_string(g.k);
    aggs += ',';
    aggs += g.up;
    aggs += ',';
    aggs += csv_opt(g.mu);
    aggs += ',';
    aggs += std::to_string(g.count);
    aggs += ',';
    append_metrics(aggs, g.means);
    aggs += '\n';
  }
  write_file(std::filesystem::path(outdir) / "aggregates.csv", aggs);
  return outdir;
}

void emit_spectrum_csv(const SpdMatrix& a, const std::string& path) {
  const Eigen::VectorXd& eigs = a.spectrum();
  std::string out = "i,lambda\n";
  for (Eigen::Index i = 0; i < eigs.size(); ++i) {
    out += std::to_string(i + 1);
    out += ',';
    out += csv_num(eigs(i));
    out += '\n';
  }
  write_file(path, out);
}

}  // namespace nymp
