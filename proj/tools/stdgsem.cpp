#include "CLI11.hpp"

#include "stdgsem/experiments.hpp"

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace stdgsem;

namespace {

struct Options {
  std::string method = "lodg";
  int ntau = 2;
  std::vector<int> n_list;
  int n = 8;
  int p = -1;  // -1: derive from ntau
  double dt = 0.0;
  int steps = 0;
  std::string jac_form = "a";
  std::string norm = "pointwise";
  std::string form = "all";
  std::string what = "tableau";
  std::string model = "advdiff";
  double newton_tol = -1.0;
  bool allow_large = false;
  bool dump_elements = false;
  std::string out = ".";
};

Method parse_method(const std::string& name) {
  return name == "stdg" ? Method::stdg : Method::lodg;
}

JacobianForm parse_jac_form(const std::string& name) {
  return name == "ainv" ? JacobianForm::a_inv_form : JacobianForm::a_form;
}

NewtonConfig newton_config(const Options& opt) {
  NewtonConfig cfg;
  if (opt.newton_tol > 0) {
    cfg.abs_tol = opt.newton_tol;
    cfg.rel_tol = opt.newton_tol;
  }
  return cfg;
}

std::string ensure_out(const Options& opt) {
  std::filesystem::create_directories(opt.out);
  return opt.out;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

void run_tableau(const Options& opt) {
  const std::string dir = ensure_out(opt);
  Stopwatch watch;
  if (opt.what == "lgl") {
    const auto rule = lgl_rule<double>(opt.ntau);
    const std::string path =
        dir + "/lgl_ntau" + std::to_string(opt.ntau) + ".csv";
    auto out = open_csv(path, "tableau lgl");
    out << "field,i,j,value\n";
    for (int i = 0; i < rule.n; ++i)
      out << "lgl_node," << i << ",0," << fmt_g(rule.nodes[i]) << "\n";
    for (int i = 0; i < rule.n; ++i)
      out << "lgl_weight," << i << ",0," << fmt_g(rule.weights[i]) << "\n";
    std::cout << "wrote " << path << " in " << fmt_g(watch.seconds())
              << " s\n";
    return;
  }
  const auto ops = sbp_operators(opt.ntau);
  const auto tab = to_butcher(ops);
  const auto defects = order_condition_defects(tab, 2 * opt.ntau - 2);
  const std::string path =
      dir + "/tableau_ntau" + std::to_string(opt.ntau) + ".csv";
  auto out = open_csv(path, "tableau");
  out << "field,i,j,value\n";
  for (int i = 0; i < tab.s; ++i)
    for (int j = 0; j < tab.s; ++j)
      out << "A," << i << "," << j << "," << fmt_g(tab.A(i, j)) << "\n";
  for (int j = 0; j < tab.s; ++j)
    out << "b,0," << j << "," << fmt_g(tab.b[j]) << "\n";
  for (int j = 0; j < tab.s; ++j)
    out << "c,0," << j << "," << fmt_g(tab.c[j]) << "\n";
  out << "sbp_defect,0,0," << fmt_g(sbp_defect(ops)) << "\n";
  for (int j = 0; j < defects.B.size(); ++j)
    out << "order_defect_B,0," << j + 1 << "," << fmt_g(defects.B[j]) << "\n";
  for (int j = 0; j < defects.C.size(); ++j)
    out << "order_defect_C,0," << j + 1 << "," << fmt_g(defects.C[j]) << "\n";
  for (int j = 0; j < defects.D.size(); ++j)
    out << "order_defect_D,0," << j + 1 << "," << fmt_g(defects.D[j]) << "\n";
  std::cout << "wrote " << path << " in " << fmt_g(watch.seconds()) << " s\n";
}

void run_eoc_cmd(const Options& opt) {
  const std::string dir = ensure_out(opt);
  Stopwatch watch;
  std::vector<int> Ns = opt.n_list;
  if (Ns.empty())
    for (int N = 8; N <= 512; N *= 2) Ns.push_back(N);
  const EocNorm norm =
      opt.norm == "l2time" ? EocNorm::l2_time : EocNorm::pointwise;
  const auto report =
      run_eoc_testeq(parse_method(opt.method), opt.ntau, norm, Ns,
                     newton_config(opt), parse_jac_form(opt.jac_form));
  const std::string path = dir + "/eoc_" + report.label + ".csv";
  write_eoc_csv(report, path);
  std::cout << "wrote " << path << "\nrates:";
  for (double r : report.rates) std::cout << " " << fmt_g(r);
  std::cout << "\nruntime " << fmt_g(watch.seconds()) << " s\n";
}

void run_advdiff_cmd(const Options& opt) {
  const std::string dir = ensure_out(opt);
  std::optional<double> dt_fixed;
  if (opt.dt > 0) dt_fixed = opt.dt;
  std::optional<int> steps;
  if (opt.steps > 0) steps = opt.steps;
  const auto result =
      run_advdiff(parse_method(opt.method), opt.ntau, opt.n, dt_fixed, steps,
                  newton_config(opt), parse_jac_form(opt.jac_form));
  const std::string path = dir + "/advdiff_" + opt.method + "_ntau" +
                           std::to_string(opt.ntau) + "_n" +
                           std::to_string(opt.n) + ".csv";
  auto out = open_csv(path, "advdiff");
  out << "method,ntau,n,steps,dt,l2_error,total_newton_iterations\n";
  out << opt.method << "," << opt.ntau << "," << result.N << ","
      << result.n_steps << "," << fmt_g(result.dt) << ","
      << fmt_g(result.l2_error_final) << "," << result.total_newton_iterations
      << "\n";
  std::cout << "wrote " << path << "\nl2_error " << fmt_g(result.l2_error_final)
            << "\nruntime " << fmt_g(result.runtime_seconds) << " s\n";
}

void run_euler_cmd(const Options& opt) {
  const std::string dir = ensure_out(opt);
  const int p = opt.p < 0 ? 1 : opt.p;
  const double dt = opt.dt > 0 ? opt.dt : 0.05;
  const int steps = opt.steps > 0 ? opt.steps : 10;
  const auto result = run_euler_vortex(
      parse_method(opt.method), opt.ntau, opt.n, dt, steps, newton_config(opt),
      p, opt.allow_large, parse_jac_form(opt.jac_form));
  const std::string path = dir + "/euler_vortex_" + opt.method + "_ntau" +
                           std::to_string(opt.ntau) + "_n" +
                           std::to_string(opt.n) + ".csv";
  auto out = open_csv(path, "euler-vortex");
  out << "method,ntau,n,p,dt,steps,l2_density_error,min_density,"
         "max_newton_per_step,total_newton_iterations\n";
  out << opt.method << "," << opt.ntau << "," << opt.n << "," << p << ","
      << fmt_g(dt) << "," << steps << "," << fmt_g(result.l2_density_error)
      << "," << fmt_g(result.min_density) << "," << result.max_newton_per_step
      << "," << result.total_newton_iterations << "\n";
  std::cout << "wrote " << path << "\nl2_density_error "
            << fmt_g(result.l2_density_error) << "\nmin_density "
            << fmt_g(result.min_density) << "\nruntime "
            << fmt_g(result.runtime_seconds) << " s\n";
}

void run_sparsity_cmd(const Options& opt) {
  const std::string dir = ensure_out(opt);
  Stopwatch watch;
  const int ntau = opt.ntau;
  std::vector<SparsityForm> forms;
  if (opt.form == "all")
    forms = {SparsityForm::st, SparsityForm::a_form, SparsityForm::a_inv_form,
             SparsityForm::a_inv_permuted};
  else if (opt.form == "st")
    forms = {SparsityForm::st};
  else if (opt.form == "a")
    forms = {SparsityForm::a_form};
  else if (opt.form == "ainv")
    forms = {SparsityForm::a_inv_form};
  else
    forms = {SparsityForm::a_inv_permuted};
  for (auto form : forms) {
    const auto pattern = dump_sparsity(opt.p, ntau, form, dir);
    std::cout << "wrote " << dir << "/sparsity_p" << opt.p << "_ntau" << ntau
              << "_" << sparsity_form_name(form) << ".{pbm,csv} nnz "
              << pattern.nnz() << "\n";
  }
  std::cout << "runtime " << fmt_g(watch.seconds()) << " s\n";
}

void run_dump_field(const Options& opt) {
  const std::string dir = ensure_out(opt);
  Stopwatch watch;
  const int ntau = opt.ntau;
  const double dt = opt.dt > 0 ? opt.dt : 0.1;
  const int steps = opt.steps > 0 ? opt.steps : 10;
  const double t_end = dt * steps;

  SemiDiscreteSystem system;
  SpaceFunction initial;
  if (opt.model == "testeq") {
    system = test_equation_system();
    initial = [](const Vec<>&) { return Vec<>::Constant(1, 4.0).eval(); };
  } else if (opt.model == "advection") {
    auto mesh = uniform_mesh(1, Vec<>::Zero(1), Vec<>::Ones(1),
                             Eigen::VectorXi::Constant(1, opt.n));
    const int p = opt.p < 0 ? ntau - 1 : opt.p;
    system = assemble_semidiscrete(dg_space(mesh, p),
                                   advection_model(Vec<>::Ones(1)));
    initial = [](const Vec<>& x) {
      return Vec<>::Constant(1, std::sin(2 * M_PI * x[0])).eval();
    };
  } else if (opt.model == "advdiff") {
    auto mesh = uniform_mesh(2, Vec<>::Zero(2), Vec<>::Ones(2),
                             Eigen::VectorXi::Constant(2, opt.n));
    const int p = opt.p < 0 ? ntau - 1 : opt.p;
    system = assemble_semidiscrete(dg_space(mesh, p),
                                   advdiff_model(2, rotating_field(), 0.001));
    initial = [](const Vec<>& x) {
      return Vec<>::Constant(1, rotating_pulse_exact(0.0, x[0], x[1])).eval();
    };
  } else {  // euler
    if (opt.n > 32 && !opt.allow_large)
      throw std::invalid_argument("dump-field: n > 32 requires --allow-large");
    auto mesh = uniform_mesh(2, Vec<>::Constant(2, -10.0),
                             Vec<>::Constant(2, 10.0),
                             Eigen::VectorXi::Constant(2, opt.n));
    const int p = opt.p < 0 ? 1 : opt.p;
    system = assemble_semidiscrete(dg_space(mesh, p, 4), euler_model());
    initial = [](const Vec<>& x) {
      return vortex_initial(x[0], x[1]).conservative();
    };
  }

  const Vec<> u0 = interpolate(system.space, initial).coeffs;
  write_field_csv(system.space, u0, dir + "/field_initial.csv",
                  "field " + opt.model + " t=0");

  Vec<> times;
  std::vector<Vec<>> states;
  std::vector<Vec<>> elements;
  if (parse_method(opt.method) == Method::lodg) {
    auto traj = integrate(system, lobatto_tableau<>(ntau), 0.0, u0, t_end,
                          steps, newton_config(opt),
                          parse_jac_form(opt.jac_form));
    times = traj.times;
    states = traj.states;
    if (opt.dump_elements) {
      const int dof = system.dof;
      for (const auto& stages : traj.stage_solutions) {
        Vec<> stacked(ntau * dof);
        for (int j = 0; j < ntau; ++j)
          stacked.segment(j * dof, dof) = stages[j];
        elements.push_back(std::move(stacked));
      }
    }
  } else {
    auto traj = stdg_integrate(system, sbp_operators(ntau), 0.0, u0, t_end,
                               steps, newton_config(opt));
    times = traj.times;
    states = traj.states;
    if (opt.dump_elements) elements = traj.element_solutions;
  }
  write_field_csv(system.space, states.back(), dir + "/field_final.csv",
                  "field " + opt.model + " t=" + fmt_g(t_end));
  write_trajectory_csv(system.space, times, states, dir + "/trajectory.csv");
  std::cout << "wrote " << dir << "/field_initial.csv\nwrote " << dir
            << "/field_final.csv\nwrote " << dir << "/trajectory.csv\n";
  if (opt.dump_elements) {
    write_elements_csv(system.space, ntau, times, elements,
                       dir + "/elements.csv");
    std::cout << "wrote " << dir << "/elements.csv\n";
  }
  std::cout << "runtime " << fmt_g(watch.seconds()) << " s\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DG spectral element solvers with equivalent space-time and "
               "method-of-lines time integration"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* cmd, bool with_method = true) {
    if (with_method)
      cmd->add_option("--method", opt.method, "time integrator")
          ->check(CLI::IsMember({"lodg", "stdg"}));
    cmd->add_option("--ntau", opt.ntau, "temporal nodes per step")
        ->check(CLI::Range(2, 4));
    cmd->add_option("--newton-tol", opt.newton_tol,
                    "Newton absolute and relative tolerance");
    cmd->add_option("--jac-form", opt.jac_form,
                    "stage Jacobian formulation (lodg only)")
        ->check(CLI::IsMember({"a", "ainv"}));
    cmd->add_option("--out", opt.out, "output directory");
  };

  auto* tableau = app.add_subcommand(
      "tableau", "dump Butcher tableau / quadrature data as CSV");
  add_common(tableau, false);
  tableau->add_option("--what", opt.what, "tableau or lgl")
      ->check(CLI::IsMember({"tableau", "lgl"}));

  auto* eoc_cmd = app.add_subcommand(
      "eoc", "test-equation convergence study (pointwise or L2-in-time)");
  add_common(eoc_cmd);
  eoc_cmd->add_option("--n", opt.n_list, "step counts (default 8..512)");
  eoc_cmd->add_option("--norm", opt.norm, "error norm")
      ->check(CLI::IsMember({"pointwise", "l2time"}));

  auto* advdiff = app.add_subcommand(
      "advdiff", "rotating pulse advection-diffusion to T=1");
  add_common(advdiff);
  advdiff->add_option("--n", opt.n, "cells per dimension")->required();
  advdiff->add_option("--dt", opt.dt, "fixed step size (default 1/n)");
  advdiff->add_option("--steps", opt.steps, "explicit step count");

  auto* euler = app.add_subcommand("euler-vortex",
                                   "isentropic vortex on [-10,10]^2");
  add_common(euler);
  euler->add_option("--n", opt.n, "cells per dimension (<= 32)");
  euler->add_option("--p", opt.p, "spatial polynomial order");
  euler->add_option("--dt", opt.dt, "step size");
  euler->add_option("--steps", opt.steps, "step count");
  euler->add_flag("--allow-large", opt.allow_large,
                  "lift the 32-cell safety cap");

  auto* sparsity = app.add_subcommand(
      "sparsity", "Jacobian sparsity patterns of single-element advection");
  add_common(sparsity, false);
  sparsity->add_option("--p", opt.p, "spatial polynomial order")
      ->required()
      ->check(CLI::Range(1, 3));
  sparsity->add_option("--form", opt.form, "which Jacobian")
      ->check(CLI::IsMember({"all", "st", "a", "ainv", "ainv-permuted"}));

  auto* dump = app.add_subcommand("dump-field",
                                  "integrate a model and dump field CSVs");
  add_common(dump);
  dump->add_option("--model", opt.model, "model to run")
      ->check(CLI::IsMember({"testeq", "advection", "advdiff", "euler"}));
  dump->add_option("--n", opt.n, "cells per dimension");
  dump->add_option("--p", opt.p, "spatial polynomial order");
  dump->add_option("--dt", opt.dt, "step size");
  dump->add_option("--steps", opt.steps, "step count");
  dump->add_flag("--allow-large", opt.allow_large,
                 "lift the 32-cell safety cap");
  dump->add_flag("--dump-elements", opt.dump_elements,
                 "also dump per-element temporal-node solutions");

  try {
    app.parse(argc, argv);
    if (app.got_subcommand(tableau)) run_tableau(opt);
    if (app.got_subcommand(eoc_cmd)) run_eoc_cmd(opt);
    if (app.got_subcommand(advdiff)) run_advdiff_cmd(opt);
    if (app.got_subcommand(euler)) run_euler_cmd(opt);
    if (app.got_subcommand(sparsity)) {
      if (sparsity->count("--ntau") == 0) opt.ntau = opt.p + 1;
      run_sparsity_cmd(opt);
    }
    if (app.got_subcommand(dump)) run_dump_field(opt);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const NonconvergenceError& e) {
    std::cerr << "nonconvergence: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
