#include "lcq/experiments.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace lcq;

namespace {

// Fields cross the boundary as (nx, ny, nz, 3, 3) arrays, x fastest in memory order of the grid.
py::array_t<double> field_to_array(const QField& f) {
  const auto& d = f.spec.dims;
  py::array_t<double> out({d[0], d[1], d[2], 3, 3});
  auto a = out.mutable_unchecked<5>();
  for (long n = 0; n < f.spec.num_nodes(); ++n) {
    const auto c = f.spec.coords(n);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) a(c[0], c[1], c[2], i, j) = f.values[n](i, j);
  }
  return out;
}

py::dict report_dict(const SolveReport& r) {
  py::dict d;
  d["iterations"] = r.iterations;
  d["final_energy"] = r.final_energy;
  d["final_grad_norm"] = r.final_grad_norm;
  d["converged"] = r.converged;
  d["failed"] = r.failed;
  d["message"] = r.message;
  d["energy_trace"] = r.energy_trace;
  d["max_q_norm_trace"] = r.max_Q_norm_trace;
  return d;
}

} // namespace

PYBIND11_MODULE(_lcq, m) {
  m.doc() = "Landau-de Gennes Q-tensor energies, constant relations and solvers";
  py::register_exception<precondition_error>(m, "PreconditionError", PyExc_ValueError);

  py::class_<BulkParams>(m, "BulkParams")
      .def(py::init<double, double, double>(), py::arg("a") = 1.0, py::arg("b") = 1.0, py::arg("c") = 1.0)
      .def_readonly("a", &BulkParams::a)
      .def_readonly("b", &BulkParams::b)
      .def_readonly("c", &BulkParams::c)
      .def_readonly("s_plus", &BulkParams::s_plus);

  py::class_<ElasticConstants>(m, "ElasticConstants")
      .def(py::init([](double L1, double L2, double L3, double L4) { return ElasticConstants{L1, L2, L3, L4}; }),
           py::arg("L1") = 0.0, py::arg("L2") = 0.0, py::arg("L3") = 0.0, py::arg("L4") = 0.0)
      .def_readwrite("L1", &ElasticConstants::L1)
      .def_readwrite("L2", &ElasticConstants::L2)
      .def_readwrite("L3", &ElasticConstants::L3)
      .def_readwrite("L4", &ElasticConstants::L4)
      .def("__repr__", [](const ElasticConstants& L) {
        return "ElasticConstants(" + std::to_string(L.L1) + ", " + std::to_string(L.L2) + ", " +
               std::to_string(L.L3) + ", " + std::to_string(L.L4) + ")";
      });

  py::class_<FrankConstants>(m, "FrankConstants")
      .def(py::init([](double k1, double k2, double k3, double k4) { return FrankConstants{k1, k2, k3, k4}; }),
           py::arg("k1") = 0.0, py::arg("k2") = 0.0, py::arg("k3") = 0.0, py::arg("k4") = 0.0)
      .def_readwrite("k1", &FrankConstants::k1)
      .def_readwrite("k2", &FrankConstants::k2)
      .def_readwrite("k3", &FrankConstants::k3)
      .def_readwrite("k4", &FrankConstants::k4);

  m.def("s_plus", py::overload_cast<double, double, double>(&s_plus), py::arg("a"), py::arg("b"), py::arg("c"));
  m.def("frank_from_elastic", &frank_from_elastic, py::arg("L"), py::arg("s_plus"));
  m.def("elastic_from_frank", &elastic_from_frank, py::arg("k"), py::arg("s_plus"));
  m.def("check_L_cond", &check_L_cond, py::arg("L"), py::arg("s_plus"));
  m.def("check_coercivity_iff", &check_coercivity_iff, py::arg("L"), py::arg("s_plus"));
  m.def("check_er1", &check_er1, py::arg("L"), py::arg("s_plus"));
  m.def("check_ericksen", &check_ericksen, py::arg("k"));
  m.def("alpha", &alpha, py::arg("L"), py::arg("s_plus"));
  m.def("alpha_e2", &alpha_e2, py::arg("L"), py::arg("s_plus"));
  m.def("bar_alpha", &bar_alpha, py::arg("L"), py::arg("s_plus"));
  m.def("tilde_alpha", &tilde_alpha, py::arg("k"));

  m.def("from_director", [](const Vec3& u, double s) { return Mat3(from_director(u, s)); }, py::arg("u"), py::arg("s"));
  m.def("project_uniaxial", [](const Mat3& q, double s) { return Mat3(project_uniaxial(q, s).q); }, py::arg("q"),
        py::arg("s_plus"));
  m.def("uniaxial_identity_residual", &uniaxial_identity_residual, py::arg("q"), py::arg("s_plus"));

  m.def("bulk_f", &bulk_f, py::arg("q"), py::arg("bulk"));
  m.def("bulk_hessian", &bulk_hessian, py::arg("q"), py::arg("bulk"));
  m.def("elastic_fE", &elastic_fE, py::arg("q"), py::arg("p"), py::arg("L"));
  m.def("elastic_fE1", [](const Mat3& q, const GradQ& p, const ElasticConstants& L, double s) {
    return elastic_fE1(q, p, L, s).total;
  }, py::arg("q"), py::arg("p"), py::arg("L"), py::arg("s_plus"));
  m.def("elastic_fE2", [](const Mat3& q, const GradQ& p, const ElasticConstants& L, double s) {
    return elastic_fE2(q, p, L, s).total;
  }, py::arg("q"), py::arg("p"), py::arg("L"), py::arg("s_plus"));
  m.def("oseen_frank_W", &oseen_frank_W, py::arg("u"), py::arg("grad_u"), py::arg("k"));

  m.def("coercivity_falsify", [](const ElasticConstants& L, double s, long budget, std::uint64_t seed) {
    const FalsifyResult r = coercivity_falsify(L, s, budget, seed);
    py::dict d;
    d["evaluations"] = r.evaluations;
    d["witness"] = r.witness ? py::object(py::float_(r.witness->density)) : py::none();
    return d;
  }, py::arg("L"), py::arg("s_plus"), py::arg("budget") = 100000, py::arg("seed") = 1);

  m.def("minimize_hedgehog", [](int n, const ElasticConstants& L, const BulkParams& bp, double L_param,
                                double grad_tol, int max_iters) {
    QField f = hedgehog_boundary(cube_grid(n), bp.s_plus);
    initialize_interior(f, bp.s_plus, InitPolicy{});
    SolveConfig cfg;
    cfg.L_param = L_param;
    cfg.grad_tol = grad_tol;
    cfg.max_iters = max_iters;
    const auto [q, rep] = minimize(f, L, bp, cfg);
    return py::make_tuple(field_to_array(q), report_dict(rep));
  }, py::arg("n"), py::arg("L"), py::arg("bulk"), py::arg("L_param") = 0.1, py::arg("grad_tol") = 1e-6,
     py::arg("max_iters") = 20000);

  m.def("run_experiment", [](const std::string& ini_text, const std::string& command, const std::string& out_dir) {
    ExperimentConfig cfg = config_from_ini(IniFile::parse(ini_text));
    if (!command.empty()) cfg.command = parse_command(command);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    const ExperimentResult r = run_experiment(cfg);
    py::list checks;
    for (const CheckRow& c : r.checks) {
      py::dict d;
      d["suite"] = c.suite;
      d["check"] = c.check;
      d["value"] = c.value;
      d["threshold"] = c.threshold;
      d["pass"] = c.pass;
      d["informational"] = c.informational;
      checks.append(d);
    }
    return py::make_tuple(r.ok, checks, r.summary);
  }, py::arg("ini_text") = "", py::arg("command") = "", py::arg("out_dir") = "");
}
