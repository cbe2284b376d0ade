// Copyright 2026 The costbo Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "costbo/problems.hpp"

#include <boost/random/sobol.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "costbo/error.hpp"

namespace costbo {

std::size_t default_initial_size(std::size_t dim) { return 2 * (dim + 1); }

// -- Problem --------------------------------------------------------------------

Problem::Problem(std::string name, Points candidates, Eigen::VectorXd objective,
                 CostModel cost_model, std::optional<Eigen::VectorXd> test_objective,
                 std::optional<Eigen::VectorXd> report_raw_costs)
    : name_(std::move(name)),
      candidates_(std::make_shared<const Points>(std::move(candidates))),
      objective_(std::move(objective)),
      test_objective_(std::move(test_objective)),
      cost_model_(std::move(cost_model)) {
  if (candidates_->rows() == 0 || candidates_->cols() == 0) {
    throw InvalidArgument("problem: empty candidate set");
  }
  if (objective_.size() != candidates_->rows()) {
    throw InvalidArgument("problem: objective and candidate set differ in length");
  }
  if (test_objective_ && test_objective_->size() != objective_.size()) {
    throw InvalidArgument("problem: test objective and objective differ in length");
  }
  if (!objective_.allFinite()) throw InvalidArgument("problem: objective must be finite");
  policy_raw_ = cost_model_.raw_costs(*candidates_);
  report_raw_ = report_raw_costs ? *report_raw_costs : policy_raw_;
  if (report_raw_.size() != objective_.size() || !(report_raw_.array() > 0.0).all()) {
    throw InvalidArgument("problem: reported costs must be positive and aligned");
  }
}

double Problem::observe(Eigen::Index j) const {
  if (j < 0 || j >= size()) throw InvalidArgument("problem: candidate index out of range");
  return objective_[j];
}

const Eigen::VectorXd& Problem::truth_reported() const {
  return test_objective_ ? *test_objective_ : objective_;
}

Problem Problem::with_lambda(double lambda) const {
  Problem p = *this;
  p.cost_model_ = cost_model_.with_lambda(lambda);
  return p;
}

Eigen::VectorXd Problem::unscale(std::span<const double> x) const {
  if (static_cast<Eigen::Index>(x.size()) != dim()) {
    throw InvalidArgument("unscale: dimension mismatch");
  }
  Eigen::VectorXd out(dim());
  for (Eigen::Index a = 0; a < dim(); ++a) {
    const double lo = feature_min.size() ? feature_min[a] : 0.0;
    const double range = feature_range.size() ? feature_range[a] : 1.0;
    out[a] = lo + x[static_cast<std::size_t>(a)] * range;
  }
  return out;
}

// -- synthetic ------------------------------------------------------------------

Points sobol_points(Eigen::Index dim, Eigen::Index size, std::uint64_t seed) {
  if (dim < 1 || size < 1) throw InvalidArgument("sobol_points: dim and size must be >= 1");
  boost::random::sobol engine(static_cast<std::size_t>(dim));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> shift(static_cast<std::size_t>(dim));
  for (double& s : shift) s = unit(rng);
  Points out(size, dim);
  for (Eigen::Index i = 0; i < size; ++i) {
    for (Eigen::Index a = 0; a < dim; ++a) {
      const double u = std::ldexp(static_cast<double>(engine()), -64) +
                       shift[static_cast<std::size_t>(a)];
      out(i, a) = u - std::floor(u);
    }
  }
  return out;
}

Problem make_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
  if (spec.dim < 1) throw InvalidArgument("make_synthetic: dim must be >= 1");
  const Points grid = spec.dim == 1 ? unit_grid(spec.grid_size)
                                    : sobol_points(spec.dim, spec.grid_size, seed ^ 0x5eedc0deULL);
  Eigen::VectorXd objective = sample_prior_function(spec.kernel, grid, seed);
  Eigen::Index best = 0;
  objective.minCoeff(&best);
  const auto r = row(grid, best);
  const std::vector<double> x_star(r.begin(), r.end());

  auto known = [&](CostKind kind) {
    switch (kind) {
      case CostKind::Uniform: return CostModel::uniform(spec.lambda);
      case CostKind::Linear: return CostModel::linear(spec.lambda);
      case CostKind::Periodic:
        return CostModel::periodic(spec.lambda, x_star, spec.periodic_alpha, spec.periodic_beta);
      default: break;
    }
    throw InvalidArgument("make_synthetic: cost kind '" + std::string(to_string(kind)) +
                          "' needs a table");
  };
  CostModel model = spec.cost == CostKind::LogGp
                        ? CostModel::log_gp(spec.lambda, known(spec.hidden_cost).raw_costs(grid),
                                            spec.estimator)
                        : known(spec.cost);
  std::ostringstream name;
  name << "synthetic-" << spec.dim << "d-" << to_string(spec.cost) << "-seed" << seed;
  Problem p(name.str(), grid, std::move(objective), std::move(model));
  p.generating_kernel = spec.kernel;
  return p;
}

// -- tabular ----------------------------------------------------------------------

CostColumn parse_cost_column(std::string_view name) {
  if (name == "runtime") return CostColumn::Runtime;
  if (name == "proxy" || name == "proxy_cost") return CostColumn::Proxy;
  throw InvalidArgument("unknown cost column '" + std::string(name) + "'");
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& text, const std::filesystem::path& path, std::size_t line,
                    const std::string& column) {
  std::string_view s = text;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ParseError(path.string() + ":" + std::to_string(line) + ": column '" + column +
                     "': '" + text + "' is not a finite number");
  }
  return v;
}

}  // namespace

Problem load_tabular(const std::filesystem::path& path, const TabularSpec& spec) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open benchmark table " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file");
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  const std::vector<std::string> header = split_csv_line(line);

  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (!col.emplace(header[i], i).second) {
      throw ParseError(path.string() + ":1: duplicate column '" + header[i] + "'");
    }
  }
  auto require = [&](const std::string& name) {
    const auto it = col.find(name);
    if (it == col.end()) {
      throw ParseError(path.string() + ": missing required column '" + name + "'");
    }
    return it->second;
  };
  const std::size_t id_col = require("id");
  const std::size_t val_col = require("val_error");
  const std::size_t test_col = require("test_error");
  const std::size_t runtime_col = require("runtime");
  const bool need_proxy =
      spec.policy_cost == CostColumn::Proxy || spec.report_cost == CostColumn::Proxy;
  std::optional<std::size_t> proxy_col;
  if (col.count("proxy_cost")) {
    proxy_col = col["proxy_cost"];
  } else if (need_proxy) {
    throw ParseError(path.string() + ": missing required column 'proxy_cost'");
  }

  std::vector<std::pair<int, std::size_t>> features;
  for (const auto& [name, idx] : col) {
    if (name.size() > 1 && name[0] == 'f' &&
        std::all_of(name.begin() + 1, name.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      features.emplace_back(std::stoi(name.substr(1)), idx);
    }
  }
  if (features.empty()) throw ParseError(path.string() + ": no feature columns f1..fd");
  std::sort(features.begin(), features.end());

  std::vector<std::vector<double>> feats;
  std::vector<double> val;
  std::vector<double> test;
  std::vector<double> runtime;
  std::vector<double> proxy;
  std::vector<std::string> ids;
  std::unordered_map<std::string, std::size_t> id_line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields, found " +
                       std::to_string(fields.size()));
    }
    const std::string& id = fields[id_col];
    if (id.empty()) throw ParseError(path.string() + ":" + std::to_string(line_no) + ": empty id");
    const auto [it, fresh] = id_line.emplace(id, line_no);
    if (!fresh) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": duplicate id '" + id +
                       "' (first seen on line " + std::to_string(it->second) + ")");
    }
    ids.push_back(id);
    std::vector<double> f;
    for (const auto& [k, idx] : features) {
      f.push_back(parse_number(fields[idx], path, line_no, header[idx]));
    }
    feats.push_back(std::move(f));
    val.push_back(parse_number(fields[val_col], path, line_no, "val_error"));
    test.push_back(parse_number(fields[test_col], path, line_no, "test_error"));
    runtime.push_back(parse_number(fields[runtime_col], path, line_no, "runtime"));
    if (proxy_col) proxy.push_back(parse_number(fields[*proxy_col], path, line_no, "proxy_cost"));
    auto positive = [&](double v, const char* column) {
      if (!(v > 0.0)) {
        throw ParseError(path.string() + ":" + std::to_string(line_no) + ": column '" + column +
                         "' must be positive");
      }
    };
    positive(runtime.back(), "runtime");
    if (proxy_col) positive(proxy.back(), "proxy_cost");
  }
  if (val.empty()) throw ParseError(path.string() + ": no data rows");

  const auto n = static_cast<Eigen::Index>(val.size());
  const auto d = static_cast<Eigen::Index>(features.size());
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(d, INFINITY);
  Eigen::VectorXd hi = Eigen::VectorXd::Constant(d, -INFINITY);
  for (const auto& f : feats) {
    for (Eigen::Index a = 0; a < d; ++a) {
      lo[a] = std::min(lo[a], f[static_cast<std::size_t>(a)]);
      hi[a] = std::max(hi[a], f[static_cast<std::size_t>(a)]);
    }
  }
  Eigen::VectorXd range = hi - lo;
  for (Eigen::Index a = 0; a < d; ++a) {
    if (!(range[a] > 0.0)) range[a] = 1.0;
  }
  Points points(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index a = 0; a < d; ++a) {
      points(i, a) = (feats[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)] - lo[a]) /
                     range[a];
    }
  }
  auto column = [&](CostColumn c) {
    const std::vector<double>& src = c == CostColumn::Runtime ? runtime : proxy;
    return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(src.data(), n));
  };
  Eigen::VectorXd policy = column(spec.policy_cost);
  Eigen::VectorXd report = column(spec.report_cost);
  CostModel model = spec.unknown_cost ? CostModel::log_gp(spec.lambda, policy, spec.estimator)
                                      : CostModel::table(spec.lambda, policy);
  Problem p(path.stem().string(), std::move(points),
            Eigen::Map<const Eigen::VectorXd>(val.data(), n), std::move(model),
            Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(test.data(), n)), std::move(report));
  p.feature_min = lo;
  p.feature_range = range;
  p.ids = std::move(ids);
  return p;
}

// -- initial design -----------------------------------------------------------------

DesignMode parse_design_mode(std::string_view name) {
  if (name == "sobol") return DesignMode::Sobol;
  if (name == "random-ids" || name == "random_ids" || name == "random") return DesignMode::RandomIds;
  throw InvalidArgument("unknown initial design mode '" + std::string(name) + "'");
}

std::vector<Eigen::Index> initial_design(const Points& candidates, std::size_t n, DesignMode mode,
                                         std::uint64_t seed) {
  const auto m = static_cast<std::size_t>(candidates.rows());
  if (n > m) {
    throw InvalidArgument("initial_design: " + std::to_string(n) + " points requested from " +
                          std::to_string(m) + " candidates");
  }
  std::vector<Eigen::Index> out;
  if (n == 0) return out;
  std::vector<std::uint8_t> taken(m, 0);
  if (mode == DesignMode::RandomIds) {
    std::mt19937_64 rng(seed);
    std::vector<Eigen::Index> all(m);
    std::iota(all.begin(), all.end(), Eigen::Index{0});
    for (std::size_t i = 0; i < n; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, m - 1);
      std::swap(all[i], all[pick(rng)]);
      out.push_back(all[i]);
    }
    return out;
  }

  const Eigen::Index d = candidates.cols();
  boost::random::sobol engine(static_cast<std::size_t>(d));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> shift(static_cast<std::size_t>(d));
  for (double& s : shift) s = unit(rng);
  Eigen::RowVectorXd p(d);
  // Every candidate is reachable eventually, but bound the work anyway.
  const std::size_t max_draws = 64 * m + 1024;
  for (std::size_t draw = 0; out.size() < n && draw < max_draws; ++draw) {
    for (Eigen::Index a = 0; a < d; ++a) {
      const double u = std::ldexp(static_cast<double>(engine()), -64) +
                       shift[static_cast<std::size_t>(a)];
      p[a] = u - std::floor(u);
    }
    const Eigen::Index j = [&] {
      Eigen::Index best = 0;
      (candidates.rowwise() - p).rowwise().squaredNorm().minCoeff(&best);
      return best;
    }();
    if (!taken[static_cast<std::size_t>(j)]) {
      taken[static_cast<std::size_t>(j)] = 1;
      out.push_back(j);
    }
  }
  for (std::size_t j = 0; out.size() < n && j < m; ++j) {
    if (!taken[j]) {
      taken[j] = 1;
      out.push_back(static_cast<Eigen::Index>(j));
    }
  }
  return out;
}

// -- Pandora ----------------------------------------------------------------------------

PandoraInstance make_pandora(std::vector<PandoraBox> boxes) {
  if (boxes.empty()) throw InvalidArgument("pandora: need at least one box");
  if (boxes.size() > kPandoraMaxBoxes) {
    throw InvalidArgument("pandora: at most " + std::to_string(kPandoraMaxBoxes) + " boxes");
  }
  for (std::size_t b = 0; b < boxes.size(); ++b) {
    const PandoraBox& box = boxes[b];
    const std::string where = "pandora box " + std::to_string(b) + ": ";
    if (box.support.empty() || box.support.size() != box.probs.size()) {
      throw InvalidArgument(where + "support and probabilities must be nonempty and aligned");
    }
    if (box.support.size() > kPandoraMaxAtoms) {
      throw InvalidArgument(where + "at most " + std::to_string(kPandoraMaxAtoms) + " atoms");
    }
    double total = 0.0;
    for (std::size_t k = 0; k < box.probs.size(); ++k) {
      if (!(box.probs[k] >= 0.0) || !std::isfinite(box.support[k])) {
        throw InvalidArgument(where + "probabilities must be nonnegative, values finite");
      }
      total += box.probs[k];
    }
    if (std::abs(total - 1.0) > 1e-12) {
      std::ostringstream msg;
      msg.precision(17);
      msg << where << "probabilities sum to " << total << ", not 1";
      throw InvalidArgument(msg.str());
    }
    if (!(box.cost > 0.0) || !std::isfinite(box.cost)) {
      throw InvalidArgument(where + "cost must be positive");
    }
  }
  return PandoraInstance{std::move(boxes)};
}

PandoraInstance random_pandora(std::mt19937_64& rng, std::size_t max_boxes, std::size_t max_atoms) {
  std::uniform_int_distribution<std::size_t> nbox(1, max_boxes);
  std::uniform_int_distribution<std::size_t> natom(1, max_atoms);
  std::uniform_real_distribution<double> value(0.0, 1.0);
  std::uniform_real_distribution<double> weight(0.05, 1.0);
  std::uniform_real_distribution<double> cost(0.01, 0.3);
  std::vector<PandoraBox> boxes(nbox(rng));
  for (PandoraBox& box : boxes) {
    const std::size_t k = natom(rng);
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      box.support.push_back(value(rng));
      box.probs.push_back(weight(rng));
      total += box.probs.back();
    }
    for (double& p : box.probs) p /= total;
    box.cost = cost(rng);
  }
  return make_pandora(std::move(boxes));
}

}  // namespace costbo
