#include "exest/runner.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "exest/errors.hpp"
#include "exest/models.hpp"

namespace exest {

namespace {

std::string fmt6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

double parse_double(const std::string& token, const std::string& context) {
  try {
    std::size_t pos = 0;
    double v = std::stod(token, &pos);
    if (pos != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw ParseError(context + ": bad number '" + token + "'");
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

Eigen::MatrixXd load_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open transition matrix file '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto& tok : split(line, ','))
      row.push_back(parse_double(tok, "matrix entry"));
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError("ragged transition matrix in '" + path + "'");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("empty transition matrix in '" + path + "'");
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows.front().size(); ++j) m(i, j) = rows[i][j];
  return m;
}

bool is_harris(EstimatorKind kind) {
  return kind == EstimatorKind::HarrisIndependent || kind == EstimatorKind::HarrisImproved;
}

int ar_functional_index(const std::string& name) {
  if (name.empty() || name == "f1" || name == "x") return 1;
  if (name == "f2" || name == "min1x") return 2;
  if (name == "f3" || name == "x2") return 3;
  throw ParseError("unknown ar-bernoulli functional '" + name + "'");
}

std::function<double(const double&)> mm1_functional(const std::string& name) {
  if (name.empty() || name == "ind1") return [](const double& w) { return w > 1.0 ? 1.0 : 0.0; };
  if (name == "id") return [](const double& w) { return w; };
  throw ParseError("unknown mm1 functional '" + name + "'");
}

std::function<double(const int&)> finite_functional(const std::string& name) {
  if (name.empty() || name == "id") return [](const int& x) { return static_cast<double>(x); };
  throw ParseError("unknown finite-chain functional '" + name + "'");
}

}  // namespace

EstimatorKind parse_estimator(const std::string& name) {
  if (name == "z") return EstimatorKind::Z;
  if (name == "zstar") return EstimatorKind::ZStar;
  if (name == "harris-independent") return EstimatorKind::HarrisIndependent;
  if (name == "harris-improved") return EstimatorKind::HarrisImproved;
  throw ParseError("unknown estimator '" + name + "'");
}

std::string estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::Z: return "z";
    case EstimatorKind::ZStar: return "zstar";
    case EstimatorKind::HarrisIndependent:
    case EstimatorKind::HarrisImproved: return "harris";
  }
  return "?";
}

std::string coupling_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::Z: return "forward";
    case EstimatorKind::ZStar: return "backward";
    case EstimatorKind::HarrisIndependent: return "independent";
    case EstimatorKind::HarrisImproved: return "improved";
  }
  return "?";
}

TruncationLaw parse_truncation(const std::string& spec) {
  auto parts = split(spec, ':');
  if (parts.empty()) throw ParseError("empty truncation spec");
  const std::string& head = parts[0];
  if (head == "geom") {
    if (parts.size() != 2) throw ParseError("geom spec needs one ratio: 'geom:R'");
    double r = parse_double(parts[1], "geom ratio");
    if (!(r > 0.0 && r < 1.0)) throw ParseError("geom ratio must be in (0,1): '" + parts[1] + "'");
    return TruncationLaw::geometric(r);
  }
  if (head == "invk") {
    if (parts.size() != 1) throw ParseError("invk takes no parameters");
    return TruncationLaw::inverse_k();
  }
  if (head == "poly") {
    if (parts.size() != 3) throw ParseError("poly spec is 'poly:ALPHA:C'");
    double alpha = parse_double(parts[1], "poly alpha");
    double c = parse_double(parts[2], "poly c");
    if (!(alpha > 0.0)) throw ParseError("poly alpha must be > 0: '" + parts[1] + "'");
    if (!(c > 0.0)) throw ParseError("poly c must be > 0: '" + parts[2] + "'");
    return TruncationLaw::polynomial(alpha, c);
  }
  if (head == "inf") {
    if (parts.size() != 1) throw ParseError("inf takes no parameters");
    return TruncationLaw::infinite();
  }
  if (head == "seq") {
    if (parts.size() != 2) throw ParseError("seq spec is 'seq:v0,v1,...'");
    std::vector<double> values;
    for (const auto& tok : split(parts[1], ','))
      values.push_back(parse_double(tok, "seq value"));
    return TruncationLaw::explicit_sequence(std::move(values));
  }
  throw ParseError("unknown truncation family '" + head + "'");
}

ReplicateGenerator make_generator(const ExperimentConfig& config,
                                  const TruncationLaw& law) {
  if (config.model == "ar-bernoulli") {
    if (is_harris(config.estimator))
      throw ParseError("harris estimators need a minorization scheme; "
                       "ar-bernoulli is an iterated-function model");
    if (law.tail_mass_at_infinity() > 0.0)
      throw ParseError("contractive estimators require a truncation law with finite N");
    ArBernoulliChain chain = make_ar_bernoulli_chain();
    LipschitzFunctional<double> f = ar_bernoulli_functional(ar_functional_index(config.functional));
    bool backward = config.estimator == EstimatorKind::ZStar;
    return [chain, f, law, backward](RngStream& rng) {
      std::uint64_t n = law.sample(rng);
      return backward ? backward_coupled_deltas(chain, f, n, rng)
                      : forward_coupled_deltas(chain, f, n, rng);
    };
  }
  if (config.model == "mm1") {
    if (!is_harris(config.estimator))
      throw ParseError("z/zstar need an iterated-function model; mm1 is a Harris model");
    MinorizationScheme<double> scheme = make_mm1_scheme();
    std::function<double(const double&)> f = mm1_functional(config.functional);
    bool improved = config.estimator == EstimatorKind::HarrisImproved;
    return [scheme, f, law, improved](RngStream& rng) {
      std::uint64_t n = law.sample(rng);
      return improved ? improved_coupling_deltas(scheme, f, n, rng)
                      : independent_coupling_deltas(scheme, f, n, rng);
    };
  }
  if (config.model.rfind("finite:", 0) == 0) {
    if (!is_harris(config.estimator))
      throw ParseError("z/zstar need an iterated-function model; finite chains are Harris models");
    FiniteOracleChain chain(load_matrix_csv(config.model.substr(7)));
    MinorizationScheme<int> scheme = chain.scheme();
    std::function<double(const int&)> f = finite_functional(config.functional);
    bool improved = config.estimator == EstimatorKind::HarrisImproved;
    return [scheme, f, law, improved](RngStream& rng) {
      std::uint64_t n = law.sample(rng);
      return improved ? improved_coupling_deltas(scheme, f, n, rng)
                      : independent_coupling_deltas(scheme, f, n, rng);
    };
  }
  throw ParseError("unknown model '" + config.model + "'");
}

EstimateReport run_experiment(const ExperimentConfig& config) {
  if (config.step_budget.has_value() == config.replicate_count.has_value())
    throw ParseError("give exactly one of a step budget and a replicate count");
  TruncationLaw law = parse_truncation(config.truncation);
  ReplicateGenerator generator = make_generator(config, law);
  if (config.step_budget)
    return run_budgeted(generator, *config.step_budget, law, config.master_seed,
                        config.confidence_level, config.workers);
  return run_fixed_replicates(generator, *config.replicate_count, law,
                              config.master_seed, config.confidence_level,
                              config.workers);
}

std::string report_csv_header() {
  return "estimator,coupling,truncation,n_samples,mean,half_width_90,total_steps,seed";
}

std::string report_csv_row(const ExperimentConfig& config, const EstimateReport& report) {
  std::ostringstream os;
  os << estimator_name(config.estimator) << ',' << coupling_name(config.estimator)
     << ',' << config.truncation << ',' << report.replicate_count << ','
     << fmt6(report.mean) << ',' << fmt6(report.half_width) << ','
     << fmt6(report.total_cost) << ',' << report.master_seed;
  return os.str();
}

std::string report_json(const ExperimentConfig& config, const EstimateReport& report) {
  nlohmann::ordered_json j;
  j["estimator"] = estimator_name(config.estimator);
  j["coupling"] = coupling_name(config.estimator);
  j["truncation"] = config.truncation;
  j["n_samples"] = report.replicate_count;
  j["mean"] = report.mean;
  j["half_width_90"] = report.half_width;
  j["total_steps"] = report.total_cost;
  j["seed"] = report.master_seed;
  return j.dump();
}

namespace {

std::uint64_t cell_seed(std::uint64_t seed, int table_id, int cell) {
  return seed + 100003ull * static_cast<std::uint64_t>(table_id) +
         1000003ull * static_cast<std::uint64_t>(cell + 1);
}

std::string contracting_table(int table_id, const std::string& trunc,
                              std::uint64_t seed, unsigned workers) {
  const char* fn_labels[] = {"x", "min(1,x)", "x^2"};
  const char* fn_names[] = {"f1", "f2", "f3"};
  std::ostringstream os;
  os << "functional,estimator,mean,half_width_90,n_samples\n";
  int cell = 0;
  for (int fi = 0; fi < 3; ++fi) {
    for (EstimatorKind kind : {EstimatorKind::Z, EstimatorKind::ZStar}) {
      ExperimentConfig config;
      config.model = "ar-bernoulli";
      config.estimator = kind;
      config.functional = fn_names[fi];
      config.truncation = trunc;
      config.step_budget = 1e6;
      config.master_seed = cell_seed(seed, table_id, cell++);
      config.workers = workers;
      EstimateReport report = run_experiment(config);
      os << fn_labels[fi] << ',' << (kind == EstimatorKind::Z ? "Z" : "Z*") << ','
         << fmt6(report.mean) << ',' << fmt6(report.half_width) << ','
         << report.replicate_count << '\n';
    }
  }
  return os.str();
}

std::string harris_table(std::uint64_t seed, unsigned workers) {
  const double ladder[] = {1e5, 2e5, 5e5, 1e6, 2e6, 5e6,
                           1e7, 2e7, 5e7, 1e8, 2e8, 5e8};
  std::ostringstream os;
  os << "steps,mean,half_width_90,n_samples\n";
  int cell = 0;
  for (double steps : ladder) {
    ExperimentConfig config;
    config.model = "mm1";
    config.estimator = EstimatorKind::HarrisImproved;
    config.functional = "ind1";
    config.truncation = "invk";
    config.step_budget = steps;
    config.master_seed = cell_seed(seed, 3, cell++);
    config.workers = workers;
    EstimateReport report = run_experiment(config);
    os << fmt6(steps) << ',' << fmt6(report.mean) << ',' << fmt6(report.half_width)
       << ',' << report.replicate_count << '\n';
  }
  return os.str();
}

}  // namespace

std::string run_table(int table_id, std::uint64_t seed, unsigned workers) {
  switch (table_id) {
    case 1: return contracting_table(1, "geom:0.5", seed, workers);
    case 2: return contracting_table(2, "geom:0.95", seed, workers);
    case 3: return harris_table(seed, workers);
    default: throw ParseError("table id must be 1, 2 or 3");
  }
}

SignedEcdf run_ecdf_experiment(const ExperimentConfig& config, std::uint64_t n) {
  if (!is_harris(config.estimator))
    throw ParseError("the signed ecdf is built from Harris couplings");
  TruncationLaw law = parse_truncation(config.truncation);
  ReplicateGenerator generator = make_generator(config, law);
  SignedEcdf ecdf(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    RngStream rng(config.master_seed, i);
    ecdf.accumulate(generator(rng), law);
  }
  return ecdf;
}

std::string ecdf_csv(const SignedEcdf& ecdf) {
  std::ostringstream os;
  os << "x,F_left,F_right\n";
  for (const auto& p : ecdf.step_function())
    os << fmt6(p.x) << ',' << fmt6(p.left) << ',' << fmt6(p.right) << '\n';
  return os.str();
}

TruncationLaw pilot_optimal_truncation(const ExperimentConfig& config,
                                       std::uint64_t pilot_n, std::size_t horizon) {
  if (pilot_n == 0) throw DomainError("pilot needs at least one replicate");
  if (horizon == 0) throw DomainError("pilot needs a positive horizon");
  // Pilot replicates force N = horizon instead of sampling it, so build the
  // per-model generators directly rather than going through make_generator.
  std::vector<double> v;
  std::vector<double> weights;
  if (config.model == "ar-bernoulli") {
    ArBernoulliChain chain = make_ar_bernoulli_chain();
    LipschitzFunctional<double> f =
        ar_bernoulli_functional(ar_functional_index(config.functional));
    bool backward = config.estimator == EstimatorKind::ZStar;
    ReplicateGenerator gen = [chain, f, backward, horizon](RngStream& rng) {
      return backward ? backward_coupled_deltas(chain, f, horizon, rng)
                      : forward_coupled_deltas(chain, f, horizon, rng);
    };
    v = estimate_tail_covariances(gen, pilot_n, horizon, config.master_seed);
  } else {
    ReplicateGenerator gen;
    if (config.model == "mm1") {
      MinorizationScheme<double> scheme = make_mm1_scheme();
      std::function<double(const double&)> f = mm1_functional(config.functional);
      bool improved = config.estimator == EstimatorKind::HarrisImproved;
      gen = [scheme, f, improved, horizon](RngStream& rng) {
        return improved ? improved_coupling_deltas(scheme, f, horizon, rng)
                        : independent_coupling_deltas(scheme, f, horizon, rng);
      };
    } else if (config.model.rfind("finite:", 0) == 0) {
      FiniteOracleChain chain(load_matrix_csv(config.model.substr(7)));
      MinorizationScheme<int> scheme = chain.scheme();
      std::function<double(const int&)> f = finite_functional(config.functional);
      bool improved = config.estimator == EstimatorKind::HarrisImproved;
      gen = [scheme, f, improved, horizon](RngStream& rng) {
        return improved ? improved_coupling_deltas(scheme, f, horizon, rng)
                        : independent_coupling_deltas(scheme, f, horizon, rng);
      };
    } else {
      throw ParseError("unknown model '" + config.model + "'");
    }
    v = estimate_tail_covariances(gen, pilot_n, horizon, config.master_seed);
    // empirical survival of tau as cost weights (Harris optimal-N variant)
    std::vector<std::uint64_t> counts(horizon + 1, 0);
    for (std::uint64_t i = 0; i < pilot_n; ++i) {
      RngStream rng(config.master_seed, i);
      DeltaStream s = gen(rng);
      std::uint64_t reach = s.y_prime_values.size();  // = min(tau, horizon)
      for (std::size_t k = 0; k <= horizon && k <= reach; ++k) ++counts[k];
    }
    weights.resize(horizon + 1);
    for (std::size_t k = 0; k <= horizon; ++k)
      weights[k] = static_cast<double>(counts[k]) / static_cast<double>(pilot_n);
  }

  // trim to the last index with usable data
  std::size_t last = v.size() - 1;
  if (!weights.empty()) {
    while (last > 0 && !(weights[last] > 0.0)) --last;
    weights.resize(last + 1);
  }
  v.resize(last + 1);
  return weights.empty()
             ? optimal_truncation(v)
             : optimal_truncation(v, std::span<const double>(weights));
}

}  // namespace exest
