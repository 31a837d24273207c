#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lmetk/bench.hpp"
#include "lmetk/errors.hpp"
#include "lmetk/serialize.hpp"

namespace py = pybind11;
using namespace lmetk;

namespace {

LoadPolytope polytope_or_default(const NetworkCase& net,
                                 const std::optional<LoadPolytope>& poly) {
  return poly ? *poly : case_polytope(net);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Critical-region toolkit for locational marginal emissions over "
            "DC economic dispatch";

  py::register_exception<ValidationError>(m, "ValidationError",
                                          PyExc_ValueError);
  py::register_exception<InfeasibleError>(m, "InfeasibleError",
                                          PyExc_RuntimeError);
  py::register_exception<DegenerateError>(m, "DegenerateError",
                                          PyExc_RuntimeError);
  py::register_exception<LocateError>(m, "LocateError", PyExc_LookupError);
  py::register_exception<UnknownLmpError>(m, "UnknownLmpError",
                                          PyExc_LookupError);
  py::register_exception<AmbiguousLmpError>(m, "AmbiguousLmpError",
                                            PyExc_RuntimeError);

  py::class_<Generator>(m, "Generator")
      .def_readonly("bus", &Generator::bus)
      .def_readonly("cost", &Generator::cost)
      .def_readonly("emission_rate", &Generator::emission_rate)
      .def_readonly("capacity", &Generator::capacity)
      .def_readonly("fuel", &Generator::fuel);

  py::class_<NetworkCase>(m, "NetworkCase")
      .def_readonly("n_buses", &NetworkCase::n_buses)
      .def_readonly("reference_bus", &NetworkCase::reference_bus)
      .def_readonly("generators", &NetworkCase::generators)
      .def_readonly("ptdf", &NetworkCase::ptdf)
      .def_readonly("nominal_load", &NetworkCase::nominal_load)
      .def_readonly("omega", &NetworkCase::omega)
      .def_property_readonly("n_gens", &NetworkCase::n_gens)
      .def_property_readonly("n_lines", &NetworkCase::n_lines)
      .def_property_readonly("cost", &NetworkCase::cost_vector)
      .def_property_readonly("emission_rate", &NetworkCase::emission_vector)
      .def_property_readonly("capacity", &NetworkCase::capacity_vector)
      .def("fingerprint", &case_fingerprint);

  py::class_<LoadPolytope>(m, "LoadPolytope")
      .def(py::init([](Eigen::VectorXd nominal, double omega) {
             LoadPolytope p;
             p.nominal = std::move(nominal);
             p.omega = omega;
             return p;
           }),
           py::arg("nominal"), py::arg("omega"))
      .def_readonly("nominal", &LoadPolytope::nominal)
      .def_readonly("omega", &LoadPolytope::omega)
      .def("lower", &LoadPolytope::lower)
      .def("upper", &LoadPolytope::upper)
      .def("contains", &LoadPolytope::contains, py::arg("load"),
           py::arg("tol") = 1e-9);

  py::class_<CompactForm>(m, "CompactForm")
      .def_readonly("A", &CompactForm::A)
      .def_readonly("b", &CompactForm::b)
      .def_readonly("F", &CompactForm::F)
      .def_property_readonly("row_labels", [](const CompactForm& cf) {
        std::vector<std::string> labels;
        for (int i = 0; i < cf.n_rows(); ++i) labels.push_back(cf.row_label(i));
        return labels;
      });

  py::class_<DispatchSolution>(m, "DispatchSolution")
      .def_readonly("x", &DispatchSolution::x)
      .def_readonly("cost", &DispatchSolution::cost)
      .def_readonly("emissions", &DispatchSolution::emissions)
      .def_readonly("duals", &DispatchSolution::lambda)
      .def_readonly("mu", &DispatchSolution::mu)
      .def_readonly("active_set", &DispatchSolution::active_set)
      .def_readonly("degenerate", &DispatchSolution::degenerate);

  py::class_<CriticalRegion>(m, "CriticalRegion")
      .def_readonly("id", &CriticalRegion::id)
      .def_readonly("active_signature", &CriticalRegion::active_signature)
      .def_readonly("G", &CriticalRegion::G)
      .def_readonly("alpha", &CriticalRegion::alpha)
      .def_readonly("beta", &CriticalRegion::beta)
      .def_readonly("load_anchor", &CriticalRegion::l_anchor)
      .def_readonly("dispatch_anchor", &CriticalRegion::x_anchor)
      .def("contains", &CriticalRegion::contains, py::arg("load"),
           py::arg("tol") = 1e-9);

  py::class_<BuildStats>(m, "BuildStats")
      .def_readonly("regions_found", &BuildStats::regions_found)
      .def_readonly("degenerate_count", &BuildStats::degenerate_count)
      .def_readonly("infeasible_probes", &BuildStats::infeasible_probes)
      .def_readonly("explored_volume_fraction",
                    &BuildStats::explored_volume_fraction)
      .def_readonly("incomplete", &BuildStats::incomplete);

  py::class_<RegionDatabase>(m, "RegionDatabase")
      .def_readonly("case_fingerprint", &RegionDatabase::case_fingerprint)
      .def_readonly("regions", &RegionDatabase::regions)
      .def_readonly("polytope", &RegionDatabase::polytope)
      .def_readonly("stats", &RegionDatabase::stats)
      .def(
          "locate",
          [](const RegionDatabase& db, const Eigen::VectorXd& l) {
            return locate(db, l);
          },
          py::arg("load"))
      .def(
          "lme_for_load",
          [](const RegionDatabase& db, const Eigen::VectorXd& l) {
            const PriceEmissionPair pe = lme_for_load(db, l);
            return py::make_tuple(pe.region_id, pe.alpha, pe.beta);
          },
          py::arg("load"),
          "Returns (region_id, alpha, beta) for a load vector.")
      .def("to_json", &db_to_string)
      .def("save", &db_save, py::arg("path"));

  py::class_<LmpIndex>(m, "LmpIndex")
      .def_readonly("audit_pass", &LmpIndex::audit_pass)
      .def_readonly("match_tolerance", &LmpIndex::match_tolerance)
      .def_property_readonly(
          "n_entries", [](const LmpIndex& idx) { return idx.entries.size(); })
      .def(
          "lme_for_lmp",
          [](const LmpIndex& idx, const Eigen::VectorXd& alpha) {
            return lme_for_lmp(idx, alpha);
          },
          py::arg("alpha"));

  m.def("parse_case", &parse_case, py::arg("text"),
        "Parse and validate a JSON case document.");
  m.def("parse_case_file", &parse_case_file, py::arg("path"));
  m.def("build_compact", &build_compact, py::arg("case"));
  m.def(
      "solve_sced",
      [](const NetworkCase& net, const Eigen::VectorXd& load) {
        return solve_sced(net, load);
      },
      py::arg("case"), py::arg("load"),
      "Optimal dispatch, duals, and active set for one load vector.");
  m.def(
      "nodal_prices",
      [](const NetworkCase& net, const DispatchSolution& sol) {
        const NodalPrices np = nodal_prices_from_duals(net, sol);
        return py::make_tuple(np.price, np.unique);
      },
      py::arg("case"), py::arg("solution"));
  m.def(
      "enumerate_regions",
      [](const NetworkCase& net, const std::optional<LoadPolytope>& polytope,
         int workers, unsigned seed, int region_cap) {
        EnumerateOptions opt;
        opt.workers = workers;
        opt.seed = seed;
        opt.region_cap = region_cap;
        return enumerate_regions(net, polytope_or_default(net, polytope), opt);
      },
      py::arg("case"), py::arg("polytope") = std::nullopt,
      py::arg("workers") = 1, py::arg("seed") = 0, py::arg("region_cap") = 10000,
      "Enumerate the critical regions of the load polytope.");
  m.def("build_lmp_index", &build_lmp_index, py::arg("db"),
        py::arg("tol") = 1e-6);
  m.def("load_database", &db_load, py::arg("path"));
  m.def(
      "fd_lme",
      [](const NetworkCase& net, const Eigen::VectorXd& load, double delta,
         bool central) {
        FdOptions opt;
        opt.delta = delta;
        opt.central = central;
        const FdResult r = fd_lme(net, load, opt);
        return py::make_tuple(r.beta, r.node_errors);
      },
      py::arg("case"), py::arg("load"), py::arg("delta") = 1e-4,
      py::arg("central") = false,
      "Finite-difference LME; returns (beta, per_node_errors).");
  m.def("if_lme", &if_lme, py::arg("case"), py::arg("load"),
        "Single-sample KKT-sensitivity LME.");
}
