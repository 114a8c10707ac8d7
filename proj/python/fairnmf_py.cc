// Copyright 2026 The Fairer NMF Authors.
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

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "fairnmf/datasets.hpp"
#include "fairnmf/fairer_am.hpp"
#include "fairnmf/fairer_mu.hpp"
#include "fairnmf/metrics.hpp"
#include "fairnmf/nmf_standard.hpp"

namespace py = pybind11;
using namespace py::literals;

namespace {

using fairnmf::Matrix;

py::dict report_dict(const fairnmf::FitResult& r) {
  std::vector<std::vector<double>> errors;
  std::vector<std::vector<double>> losses;
  std::vector<double> objective;
  for (const fairnmf::IterationRecord& rec : r.report.trace) {
    errors.push_back(rec.group_errors);
    losses.push_back(rec.group_losses);
    objective.push_back(rec.objective);
  }
  return py::dict("W"_a = r.factors.W, "H"_a = r.factors.H, "errors"_a = errors,
                  "losses"_a = losses, "objective"_a = objective,
                  "iterations"_a = r.report.iterations(),
                  "termination"_a = std::string(fairnmf::to_string(r.report.termination)),
                  "message"_a = r.report.message);
}

fairnmf::GroupBaselines as_baselines(const std::vector<double>& values,
                                     fairnmf::Index rank) {
  fairnmf::GroupBaselines b;
  b.values = values;
  b.trials = 1;
  b.options.rank = rank;
  return b;
}

}  // namespace

PYBIND11_MODULE(_fairnmf, m) {
  m.doc() = "Fairness-aware NMF: standard MU, alternating min-max and weighted MU.";

  py::register_exception<fairnmf::DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<fairnmf::DegenerateGroupError>(m, "DegenerateGroupError",
                                                        PyExc_ValueError);
  py::register_exception<fairnmf::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<fairnmf::SolverFailure>(m, "SolverFailure", PyExc_RuntimeError);

  m.def(
      "nmf",
      [](const Matrix& x, fairnmf::Index rank, int max_iters, double rel_tol,
         std::uint64_t seed, const std::string& method) {
        if (method != "mu" && method != "am") {
          throw fairnmf::ConfigError("method must be 'mu' or 'am', got '" + method + "'");
        }
        fairnmf::NmfOptions o;
        o.rank = rank;
        o.max_iters = max_iters;
        o.rel_tol = rel_tol;
        o.seed = seed;
        py::gil_scoped_release release;
        fairnmf::FitResult r = method == "am" ? fairnmf::nmf_am(x, o) : fairnmf::nmf_mu(x, o);
        py::gil_scoped_acquire acquire;
        return report_dict(r);
      },
      "X"_a, "rank"_a, "max_iters"_a = 2000, "rel_tol"_a = 1e-4, "seed"_a = 0,
      "method"_a = "mu",
      "Standard NMF by multiplicative updates ('mu') or NNLS alternating minimization\n"
      "('am'). Returns a dict with W, H and the error trace.");

  m.def(
      "estimate_baselines",
      [](const Matrix& x, const std::vector<std::string>& labels, fairnmf::Index rank,
         int trials, std::uint64_t seed, int max_iters, double rel_tol) {
        const fairnmf::GroupedMatrix g = fairnmf::row_partition(x, labels);
        fairnmf::NmfOptions o;
        o.rank = rank;
        o.max_iters = max_iters;
        o.rel_tol = rel_tol;
        o.seed = seed;
        return fairnmf::estimate_baselines(g, o, trials).values;
      },
      "X"_a, "labels"_a, "rank"_a, "trials"_a = 5, "seed"_a = 0, "max_iters"_a = 2000,
      "rel_tol"_a = 1e-4,
      "Mean per-group reconstruction error of rank-k NMF fitted to each group alone. "
      "Groups are ordered by first appearance in `labels`.");

  m.def(
      "fairer_nmf",
      [](const Matrix& x, const std::vector<std::string>& labels,
         const std::vector<double>& baselines, fairnmf::Index rank, const std::string& method,
         int max_iters, double rel_tol, double solver_tol, std::uint64_t seed) {
        const fairnmf::GroupedMatrix g = fairnmf::row_partition(x, labels);
        fairnmf::FairerOptions o;
        o.rank = rank;
        o.max_outer_iters = max_iters;
        o.rel_tol = rel_tol;
        o.solver_tol = solver_tol;
        o.seed = seed;
        const fairnmf::GroupBaselines b = as_baselines(baselines, rank);
        fairnmf::FitResult r;
        {
          py::gil_scoped_release release;
          if (method == "am") {
            r = fairnmf::fairer_nmf_am(g, b, o);
          } else if (method == "mu") {
            r = fairnmf::fairer_nmf_mu(g, b, o);
          } else {
            throw fairnmf::ConfigError("method must be 'am' or 'mu', got '" + method + "'");
          }
        }
        py::dict d = report_dict(r);
        d["labels"] = g.labels();
        return d;
      },
      "X"_a, "labels"_a, "baselines"_a, "rank"_a, "method"_a = "mu", "max_iters"_a = 1000,
      "rel_tol"_a = 1e-4, "solver_tol"_a = 1e-6, "seed"_a = 0,
      "Fairer NMF by alternating min-max ('am') or weighted multiplicative updates ('mu').");

  m.def(
      "group_losses",
      [](const Matrix& x, const std::vector<std::string>& labels, const Matrix& w,
         const Matrix& h, const std::vector<double>& baselines) {
        const fairnmf::GroupedMatrix g = fairnmf::row_partition(x, labels);
        const std::vector<double> err = fairnmf::group_errors(g, w, h);
        return fairnmf::group_losses(g, err, baselines);
      },
      "X"_a, "labels"_a, "W"_a, "H"_a, "baselines"_a,
      "(||X_l - W_l H|| - baseline_l) / ||X_l|| for every group.");

  m.def(
      "synthetic_table1",
      [](std::uint64_t seed, bool normalize) {
        fairnmf::GroupedMatrix g = fairnmf::generate_synthetic(fairnmf::SyntheticSpec::table1(seed));
        if (normalize) g = fairnmf::normalize_features(g);
        std::vector<std::string> labels(static_cast<std::size_t>(g.rows()));
        for (const fairnmf::Group& grp : g.groups()) {
          for (fairnmf::Index r : grp.rows) labels[static_cast<std::size_t>(r)] = grp.label;
        }
        return py::make_tuple(g.matrix(), labels);
      },
      "seed"_a = 0, "normalize"_a = true,
      "Three-group synthetic matrix (1000/500/250 rows, ranks 3/3/6) and row labels.");
}
