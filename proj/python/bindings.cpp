// Copyright 2026 The mdalab Authors
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

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "mdalab/cli.hpp"
#include "mdalab/correlations.hpp"
#include "mdalab/counting.hpp"
#include "mdalab/errors.hpp"
#include "mdalab/experiments.hpp"
#include "mdalab/lattice_heights.hpp"
#include "mdalab/params.hpp"
#include "mdalab/schmidt.hpp"
#include "mdalab/table.hpp"
#include "mdalab/tessellation.hpp"
#include "mdalab/volumes.hpp"

namespace py = pybind11;
using namespace mdalab;

namespace {

py::object cell_to_py(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return py::int_(*i);
  if (const auto* d = std::get_if<double>(&c)) return py::float_(*d);
  return py::str(std::get<std::string>(c));
}

py::dict table_to_dict(const ExperimentTable& t) {
  py::dict d;
  d["name"] = t.metadata().name;
  d["columns"] = t.columns();
  py::list rows;
  for (const auto& row : t.rows()) {
    py::list r;
    for (const auto& c : row) r.append(cell_to_py(c));
    rows.append(r);
  }
  d["rows"] = rows;
  py::dict summary;
  for (const auto& [k, v] : t.summary()) summary[py::str(k)] = cell_to_py(v);
  d["summary"] = summary;
  d["csv"] = t.to_csv(false);
  return d;
}

ParamSchedule schedule(double a, double b, double c, double T, double zeta, double theta1,
                       double theta2) {
  return {a, b, c, zeta, theta1, theta2, T};
}

}  // namespace

PYBIND11_MODULE(_mdalab, m) {
  m.doc() = "Counting kernels, volumes, lattice heights and seeded experiments";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<RegimeError>(m, "RegimeError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<CapExceeded>(m, "CapExceeded", PyExc_OverflowError);
  py::register_exception<CheckFailure>(m, "CheckFailure", PyExc_RuntimeError);

  py::class_<ParamSchedule>(m, "ParamSchedule")
      .def(py::init(&schedule), py::arg("a"), py::arg("b"), py::arg("c"), py::arg("T"),
           py::arg("zeta") = 1.0, py::arg("theta1") = 1.0, py::arg("theta2") = 1.0)
      .def_readwrite("a", &ParamSchedule::a)
      .def_readwrite("b", &ParamSchedule::b)
      .def_readwrite("c", &ParamSchedule::c)
      .def_readwrite("zeta", &ParamSchedule::zeta)
      .def_readwrite("theta1", &ParamSchedule::theta1)
      .def_readwrite("theta2", &ParamSchedule::theta2)
      .def_readwrite("T", &ParamSchedule::T)
      .def("__repr__", &describe);

  m.def(
      "validate_schedule",
      [](const ParamSchedule& s, const std::string& regime) {
        if (regime != "basic" && regime != "thmcnt") throw InvalidArgument("regime must be basic or thmcnt");
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& v : validate_schedule(s, regime == "basic" ? Regime::kBasic : Regime::kThmCnt)) {
          out.emplace_back(v.inequality, v.detail);
        }
        return out;
      },
      py::arg("schedule"), py::arg("regime") = "basic",
      "List of (inequality, detail) pairs; empty when the schedule is admissible.");

  m.def(
      "apply_flow",
      [](std::pair<double, double> t, std::tuple<double, double, double> p) {
        const Point3 r = apply_flow({t.first, t.second}, {std::get<0>(p), std::get<1>(p), std::get<2>(p)});
        return std::make_tuple(r.x1, r.x2, r.y);
      },
      py::arg("t"), py::arg("p"));

  m.def(
      "in_omega",
      [](const ParamSchedule& s, std::tuple<double, double, double> p) {
        return contains(OmegaSet{s}, {std::get<0>(p), std::get<1>(p), std::get<2>(p)});
      },
      py::arg("schedule"), py::arg("p"));

  // Counting.
  py::class_<counting::CountReport>(m, "CountReport")
      .def_readonly("count", &counting::CountReport::count)
      .def_readonly("weighted_sum", &counting::CountReport::weighted_sum)
      .def_readonly("T", &counting::CountReport::T)
      .def_readonly("q_hits", &counting::CountReport::q_hits)
      .def_readonly("elapsed_ns", &counting::CountReport::elapsed_ns);

  m.def(
      "count_Q",
      [](std::pair<double, double> x, const ParamSchedule& s, std::optional<volumes::Weight> h) {
        py::gil_scoped_release release;
        return counting::count_Q(TargetPoint::reduced(x.first, x.second), s, {}, h ? &*h : nullptr);
      },
      py::arg("x"), py::arg("schedule"), py::arg("h") = py::none());
  m.def(
      "count_L",
      [](std::pair<double, double> x, double b, double T) {
        py::gil_scoped_release release;
        return counting::count_L(TargetPoint::reduced(x.first, x.second), b, T);
      },
      py::arg("x"), py::arg("b"), py::arg("T"));
  m.def(
      "count_N",
      [](std::pair<double, double> x, double b, double T) {
        py::gil_scoped_release release;
        return counting::count_N_widmer(TargetPoint::reduced(x.first, x.second), b, T);
      },
      py::arg("x"), py::arg("b"), py::arg("T"));
  m.def(
      "lattice_points_in_omega",
      [](std::pair<double, double> x, const ParamSchedule& s) {
        std::vector<std::tuple<std::int64_t, std::int64_t, std::int64_t>> out;
        for (const auto& p : counting::lattice_points_in(OmegaSet{s}, TargetPoint::reduced(x.first, x.second))) {
          out.emplace_back(p.p1, p.p2, p.q);
        }
        return out;
      },
      py::arg("x"), py::arg("schedule"));

  // Volumes.
  m.def("xi_area", &volumes::xi_area, py::arg("gamma"));
  m.def("omega_section_area", &volumes::omega_section_area, py::arg("schedule"), py::arg("y"));
  m.def("omega_volume", &volumes::omega_volume, py::arg("schedule"));
  m.def("upsilon_section_area", &volumes::upsilon_section_area, py::arg("a"), py::arg("q"));
  m.def("omega_volume_quadrature", &volumes::omega_volume_quadrature, py::arg("schedule"));

  // Tessellation.
  m.def(
      "tessellation_band",
      [](const ParamSchedule& s) {
        const auto b = tessellation::band(s);
        return std::make_pair(b.alpha, b.beta);
      },
      py::arg("schedule"));
  m.def(
      "decompose",
      [](std::tuple<double, double, double> p, const ParamSchedule& s) {
        return tessellation::decompose({std::get<0>(p), std::get<1>(p), std::get<2>(p)}, s);
      },
      py::arg("p"), py::arg("schedule"));

  // Heights.
  m.def(
      "height",
      [](std::pair<double, double> x, double r, std::pair<double, double> t) {
        const auto h = heights::height({TargetPoint::reduced(x.first, x.second), r}, {t.first, t.second});
        py::dict d;
        d["s1"] = h.s1;
        d["s2"] = h.s2;
        d["s3"] = h.s3;
        d["ht"] = h.ht;
        d["upper_bound"] = h.upper_bound;
        d["s1_witness"] = std::make_tuple(h.s1_witness.p1, h.s1_witness.p2, h.s1_witness.q);
        d["s2_witness"] = std::make_tuple(h.s2_witness.m, h.s2_witness.w1, h.s2_witness.w2);
        return d;
      },
      py::arg("x"), py::arg("r") = 1.0, py::arg("t") = std::make_pair(0.0, 0.0));

  // Correlations.
  m.def("aux_G", &correlations::aux_G, py::arg("u1"), py::arg("u2"));
  m.def(
      "aux_Ft",
      [](std::pair<double, double> t, double q, double M) {
        return correlations::aux_Ft({t.first, t.second}, q, M);
      },
      py::arg("t"), py::arg("q"), py::arg("M"));
  m.def(
      "correlation_exact",
      [](const std::vector<std::array<double, 4>>& b1, const std::vector<std::array<double, 4>>& b2,
         std::int64_t q1, std::int64_t q2) {
        auto boxes = [](const std::vector<std::array<double, 4>>& v) {
          std::vector<correlations::Rect> r;
          for (const auto& a : v) r.push_back({a[0], a[1], a[2], a[3]});
          return correlations::BoxSet2(r);
        };
        return correlations::correlation_exact(boxes(b1), boxes(b2), q1, q2);
      },
      py::arg("B1"), py::arg("B2"), py::arg("q1"), py::arg("q2"),
      "Rectangles are (x0, x1, y0, y1).");
  m.def(
      "double_sum",
      [](std::pair<double, double> t, double alpha, double beta, double M) {
        const auto r = correlations::double_sum({t.first, t.second}, alpha, beta, M);
        return std::make_tuple(r.value, r.bound, r.ratio);
      },
      py::arg("t"), py::arg("alpha"), py::arg("beta"), py::arg("M"));

  // Schmidt machinery.
  m.def("theta", &schmidt::theta, py::arg("kappa"), py::arg("t"));
  m.def("theta_inverse", &schmidt::theta_inverse, py::arg("kappa"), py::arg("u"));
  m.def(
      "dyadic_cover",
      [](std::uint64_t N, int s) {
        std::vector<std::pair<int, std::int64_t>> out;
        for (const auto& d : schmidt::dyadic_cover(N, s)) out.emplace_back(d.i, d.j);
        return out;
      },
      py::arg("N"), py::arg("s"));
  m.def("annulus", &schmidt::annulus, py::arg("alpha"), py::arg("beta"));

  // Experiments and CLI.
  m.def(
      "run_experiment",
      [](const std::string& name, const std::map<std::string, std::string>& params,
         std::uint64_t seed, unsigned threads) {
        ExperimentTable t;
        {
          py::gil_scoped_release release;
          t = experiments::run_experiment(name, ConfigSection(name, params), {seed, threads});
        }
        return table_to_dict(t);
      },
      py::arg("name"), py::arg("params") = std::map<std::string, std::string>{},
      py::arg("seed") = 1, py::arg("threads") = 1,
      "Runs a named experiment; params use the config file keys with string values.");
  m.def(
      "cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::dispatch(args, out, err);
        return std::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command line tool in-process: (exit code, stdout, stderr).");

  m.attr("__version__") = version_string();
}
