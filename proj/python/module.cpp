#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hypercone/cone_nd.hpp"
#include "hypercone/family.hpp"
#include "hypercone/io.hpp"
#include "hypercone/multicone.hpp"
#include "hypercone/separation.hpp"
#include "hypercone/stochastic.hpp"
#include "hypercone/thermo.hpp"

namespace py = pybind11;
using namespace hypercone;

namespace {

using Rows = std::vector<std::vector<double>>;

Mat2 to_mat2(const Rows& r) {
  if (r.size() != 2 || r[0].size() != 2 || r[1].size() != 2) {
    throw Error(ErrorKind::InvalidInput, "expected a 2x2 matrix");
  }
  return {r[0][0], r[0][1], r[1][0], r[1][1]};
}

Rows from_mat2(const Mat2& m) { return {{m.a, m.b}, {m.c, m.d}}; }

IfsSystem make_system(std::vector<std::string> labels, const std::vector<Rows>& mats,
                      std::optional<std::vector<double>> weights) {
  std::vector<Mat2> ms;
  for (const auto& r : mats) ms.push_back(to_mat2(r));
  return IfsSystem(std::move(labels), ms, std::move(weights));
}

std::vector<double> weights_of(const IfsSystem& s, const std::optional<std::vector<double>>& p) {
  if (p) return *p;
  if (s.weights()) return *s.weights();
  return std::vector<double>(s.size(), 1.0 / static_cast<double>(s.size()));
}

Budget budget_of(std::optional<std::uint64_t> cap) {
  Budget b = budget_from_env();
  if (cap) b.enumeration_cap = *cap;
  return b;
}

}  // namespace

PYBIND11_MODULE(_hypercone, m) {
  m.doc() = "Native core of the hypercone package";
  m.attr("__version__") = kVersion;

  static py::exception<Error> exc(m, "HyperconeError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(exc, (std::string(to_string(e.kind())) + ": " + e.what()).c_str());
    }
  });

  py::class_<IfsSystem>(m, "IfsSystem")
      .def(py::init(&make_system), py::arg("labels"), py::arg("matrices"), py::arg("weights") = py::none())
      .def_property_readonly("labels", &IfsSystem::labels)
      .def_property_readonly("matrices",
                             [](const IfsSystem& s) {
                               std::vector<Rows> out;
                               for (const auto& mm : s.matrices()) out.push_back(from_mat2(mm));
                               return out;
                             })
      .def_property_readonly("weights", &IfsSystem::weights)
      .def("__len__", &IfsSystem::size);

  py::class_<Multicone>(m, "Multicone")
      .def(py::init([](const std::vector<std::pair<double, double>>& arcs) {
             std::vector<Arc> a;
             for (const auto& [s, l] : arcs) a.push_back({s, l});
             return Multicone(a);
           }),
           py::arg("arcs"))
      .def_property_readonly("arcs",
                             [](const Multicone& u) {
                               std::vector<std::pair<double, double>> out;
                               for (const auto& a : u.arcs()) out.emplace_back(a.start, a.length);
                               return out;
                             })
      .def_property_readonly("total_length", &Multicone::total_length)
      .def("contains", [](const Multicone& u, double theta) { return u.contains(ProjPoint::reduce(theta)); });

  m.def("project_act", [](const Rows& a, double theta) { return project_act(to_mat2(a), ProjPoint::reduce(theta)).theta; });
  m.def("project_derivative",
        [](const Rows& a, double theta) { return project_derivative(to_mat2(a), ProjPoint::reduce(theta)); });
  m.def("mobius_act", [](const Rows& a, double x) { return mobius_act(to_mat2(a), x); });

  m.def("verify_strict_invariance",
        [](const IfsSystem& s, const Multicone& u) { return dump_json(to_json(verify_strict_invariance(s, u), s.labels())); });
  m.def(
      "find_multicone",
      [](const IfsSystem& s, std::uint64_t seed, std::optional<std::uint64_t> budget) -> std::optional<Multicone> {
        MulticoneSearchParams prm;
        prm.seed = seed;
        return find_multicone(s, prm, budget_of(budget)).multicone;
      },
      py::arg("system"), py::arg("seed") = 0x5eed, py::arg("budget") = py::none());
  m.def(
      "elliptic_word",
      [](const IfsSystem& s, int max_len) { return elliptic_certificate(s, max_len).elliptic; },
      py::arg("system"), py::arg("max_len") = 8);

  m.def(
      "attractor_dimension",
      [](const IfsSystem& s, const Multicone& u, int n, std::optional<std::uint64_t> budget) {
        return dump_json(to_json(attractor_dimension(s, u, n, budget_of(budget))));
      },
      py::arg("system"), py::arg("multicone"), py::arg("n"), py::arg("budget") = py::none());
  m.def("solve_dn", [](const IfsSystem& s, const Multicone& u, int n) { return solve_dn(s, u, n); });
  m.def("zeta_critical_exponent", [](const IfsSystem& s, int n) { return zeta_critical_exponent(s, n); });
  m.def("attractor_sample", [](const IfsSystem& s, const Multicone& u, int depth) {
    std::vector<double> out;
    for (const auto& p : attractor_sample(s, u, depth)) out.push_back(p.theta);
    return out;
  });
  m.def("box_counting", [](const std::vector<double>& thetas, const std::vector<double>& scales) {
    std::vector<ProjPoint> pts;
    for (double t : thetas) pts.push_back(ProjPoint::reduce(t));
    return box_counting(pts, scales);
  });

  m.def(
      "lyapunov_random",
      [](const IfsSystem& s, std::uint64_t steps, std::uint64_t seed, std::optional<std::vector<double>> p) {
        const auto e = lyapunov_random(s, weights_of(s, p), steps, seed);
        return std::make_pair(e.value, e.se);
      },
      py::arg("system"), py::arg("steps"), py::arg("seed"), py::arg("p") = py::none());
  m.def(
      "furstenberg_dimension",
      [](const IfsSystem& s, std::uint64_t steps, std::uint64_t seed, std::optional<Multicone> u,
         std::optional<std::vector<double>> p) {
        return dump_json(to_json(furstenberg_dimension(s, weights_of(s, p), u, steps, seed)));
      },
      py::arg("system"), py::arg("steps"), py::arg("seed"), py::arg("multicone") = py::none(),
      py::arg("p") = py::none());

  m.def(
      "separation_profile",
      [](const IfsSystem& s, int n, std::optional<std::uint64_t> budget) {
        return dump_json(to_json(separation_profile(s, n, {}, budget_of(budget)), s.labels()));
      },
      py::arg("system"), py::arg("n"), py::arg("budget") = py::none());
  m.def(
      "ifs_separation",
      [](const IfsSystem& s, const std::vector<double>& j, int n, bool cot) {
        std::vector<ProjPoint> pts;
        for (double t : j) pts.push_back(ProjPoint::reduce(t));
        return ifs_separation(s, pts, n, cot ? SeparationChart::Cot : SeparationChart::Angle).gap;
      },
      py::arg("system"), py::arg("j_points"), py::arg("n"), py::arg("cot_chart") = false);

  m.def(
      "strict_invariance_cone",
      [](const Mat& a, std::optional<Mat> basis) {
        const SimplicialCone cone = basis ? SimplicialCone(*basis) : SimplicialCone::orthant(static_cast<int>(a.rows()) - 1);
        return dump_json(to_json(strict_invariance_cone(a, cone)));
      },
      py::arg("a"), py::arg("basis") = py::none());
  m.def("cross_section_map", [](const Mat& a, const Vec& x) { return Vec(cross_section_map(a, x)); });
  m.def(
      "hilbert_metric",
      [](const Vec& x, const Vec& y, std::optional<Mat> basis) {
        const SimplicialCone cone = basis ? SimplicialCone(*basis) : SimplicialCone::orthant(static_cast<int>(x.size()));
        return hilbert_metric(cone, x, y);
      },
      py::arg("x"), py::arg("y"), py::arg("basis") = py::none());

  m.def(
      "family_scan",
      [](const std::vector<Mat>& base, std::optional<std::vector<Vec>> directions, double t_lo, double t_hi,
         const std::vector<double>& grid, int n) {
        std::vector<std::string> labels;
        for (std::size_t i = 0; i < base.size(); ++i) labels.push_back(std::to_string(i + 1));
        if (base.empty()) throw Error(ErrorKind::InvalidInput, "family needs at least one matrix");
        const auto fam = make_family(labels, base, SimplicialCone::orthant(static_cast<int>(base[0].rows()) - 1),
                                     std::move(directions), t_lo, t_hi);
        std::vector<std::tuple<double, std::optional<double>, double>> rows;
        for (const auto& r : family_scan(fam, grid, n)) rows.emplace_back(r.t, r.c_n, r.min_gap);
        return rows;
      },
      py::arg("base"), py::arg("directions"), py::arg("t_lo"), py::arg("t_hi"), py::arg("grid"), py::arg("n"));
}
