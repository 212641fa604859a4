// Command-line front end over the C API: grid dumps of fiducial / coherent /
// evolved states, moment tables, axiom verification reports, stability
// sweeps and action-angle inversion. Output is byte-deterministic: 12
// significant digits, '.' decimal separator, '\n' line endings, and the
// effective configuration echoed as a '#' comment header on every file.
//
// Exit codes: 0 success (verify: all reports pass), 1 failed verification,
// 2 configuration error, 3 numerical non-convergence.

#include <clocale>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ccs/ccs.h"

namespace {

struct Options {
  std::string system = "free";
  std::string scheme = "gaussian";
  double hbar = 1.0, mass = 1.0, omega = 1.0;
  double k0 = -2.5, k1 = 2.5;
  double kbar = 1.0, A = 1.0;
  double ebar = 1.0;
  double q = 0.0, p = 0.0, tau = 0.0;
  std::string grid = "-10:10:201";
  std::string out;
  std::string format = "csv";
  double tol = 1e-10;
  // subcommand extras
  std::string axiom = "all";
  std::string sweep_param = "A";
  std::vector<double> values;
  double J = 1.0;
};

struct CliError {
  int code;
  std::string msg;
};

[[noreturn]] void die(int code, const std::string& msg) {
  throw CliError{code, msg};
}

int exit_code(ccs_status st) {
  return st == CCS_ERR_NON_CONVERGENCE ? 3 : 2;
}

void check(ccs_status st) {
  if (st != CCS_OK) die(exit_code(st), ccs_last_error());
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

ccs_family make_family(const Options& o) {
  ccs_family f;
  ccs_family_init(&f);
  f.system = o.system.c_str();
  f.scheme = o.scheme.c_str();
  f.k0 = o.k0;
  f.k1 = o.k1;
  f.kbar = o.kbar;
  f.A = o.A;
  f.ebar = o.ebar;
  f.hbar = o.hbar;
  f.mass = o.mass;
  return f;
}

std::string config_header(const Options& o) {
  std::ostringstream s;
  s << "# config: system=" << o.system;
  if (o.system == "free")
    s << " scheme=" << o.scheme << " hbar=" << num(o.hbar)
      << " mass=" << num(o.mass);
  if (o.system == "iho")
    s << " ebar=" << num(o.ebar) << " A=" << num(o.A);
  else if (o.scheme == "gaussian")
    s << " kbar=" << num(o.kbar) << " A=" << num(o.A);
  else
    s << " k0=" << num(o.k0) << " k1=" << num(o.k1);
  s << " q=" << num(o.q) << " p=" << num(o.p) << " tau=" << num(o.tau)
    << " grid=" << o.grid << " format=" << o.format << " tol=" << num(o.tol);
  return s.str();
}

void write_output(const Options& o, const std::string& body) {
  const std::string text = config_header(o) + "\n" + body;
  if (o.out.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) die(2, "cannot open output file: " + o.out);
  f.write(text.data(), long(text.size()));
}

struct Grid {
  double xmin, xmax;
  long n;
};

Grid parse_grid(const std::string& spec) {
  Grid g{};
  char extra;
  if (std::sscanf(spec.c_str(), "%lf:%lf:%ld%c", &g.xmin, &g.xmax, &g.n,
                  &extra) != 3)
    die(2, "bad --grid (expected xmin:xmax:n): " + spec);
  if (g.n < 2 || !(g.xmin < g.xmax))
    die(2, "bad --grid (need n >= 2 and xmin < xmax): " + spec);
  return g;
}

void cmd_grid_dump(const Options& o, double q, double p, double tau) {
  const Grid g = parse_grid(o.grid);
  const ccs_family fam = make_family(o);
  ccs_state* s = nullptr;
  check(ccs_state_create(&fam, q, p, tau, &s));
  std::ostringstream body;
  if (o.format == "json") body << "[";
  else body << "x,re,im,abs2\n";
  for (long i = 0; i < g.n; ++i) {
    const double x = g.xmin + (g.xmax - g.xmin) * double(i) / double(g.n - 1);
    double re, im;
    const ccs_status st = ccs_state_eval(s, x, &re, &im);
    if (st != CCS_OK) {
      ccs_state_destroy(s);
      die(exit_code(st), ccs_last_error());
    }
    const double abs2 = re * re + im * im;
    if (o.format == "json")
      body << (i ? "," : "") << "{\"x\":" << num(x) << ",\"re\":" << num(re)
           << ",\"im\":" << num(im) << ",\"abs2\":" << num(abs2) << "}";
    else
      body << num(x) << "," << num(re) << "," << num(im) << "," << num(abs2)
           << "\n";
  }
  if (o.format == "json") body << "]\n";
  ccs_state_destroy(s);
  write_output(o, body.str());
}

void cmd_moments(const Options& o) {
  const ccs_family fam = make_family(o);
  ccs_state* s = nullptr;
  check(ccs_state_create(&fam, o.q, o.p, o.tau, &s));
  struct Row {
    const char* name;
    double value;
    const char* status;
  };
  std::vector<Row> rows;
  auto add = [&](const char* name, ccs_status st, double v) {
    if (st == CCS_OK)
      rows.push_back({name, v, "ok"});
    else if (st == CCS_ERR_DOMAIN)
      rows.push_back({name, 0.0, "domain_error"});  // e.g. window <Q^2>
    else {
      ccs_state_destroy(s);
      die(exit_code(st), ccs_last_error());
    }
  };
  double v = 0.0;
  ccs_status st = ccs_state_norm(s, &v);
  add("norm", st, v);
  st = ccs_state_moment_q(s, 1, &v);
  add("q1", st, v);
  st = ccs_state_moment_q(s, 2, &v);
  add("q2", st, v);
  st = ccs_state_moment_p(s, 1, &v);
  add("p1", st, v);
  st = ccs_state_moment_p(s, 2, &v);
  add("p2", st, v);
  st = ccs_state_energy(s, &v);
  add("energy", st, v);
  ccs_state_destroy(s);
  std::ostringstream body;
  if (o.format == "json") {
    body << "{";
    for (size_t i = 0; i < rows.size(); ++i)
      body << (i ? "," : "") << "\"" << rows[i].name << "\":"
           << (std::strcmp(rows[i].status, "ok") == 0 ? num(rows[i].value)
                                                      : "null");
    body << "}\n";
  } else {
    body << "moment,value,status\n";
    for (const auto& r : rows)
      body << r.name << ","
           << (std::strcmp(r.status, "ok") == 0 ? num(r.value) : "nan") << ","
           << r.status << "\n";
  }
  write_output(o, body.str());
}

int cmd_verify(const Options& o) {
  const ccs_family fam = make_family(o);
  char* json = nullptr;
  int npass = 0, nfail = 0;
  if (o.axiom == "all") {
    check(ccs_axiom_suite(&fam, &json, &npass, &nfail));
  } else {
    int pass = 0;
    check(ccs_axiom_check(&fam, o.axiom.c_str(), &json, &pass));
    npass = pass;
    nfail = 1 - pass;
    const std::string one = std::string("[") + json + "]";
    ccs_string_free(json);
    json = nullptr;
    write_output(o, one + "\n");
    return nfail == 0 ? 0 : 1;
  }
  const std::string body = std::string(json) + "\n";
  ccs_string_free(json);
  write_output(o, body);
  return nfail == 0 ? 0 : 1;
}

void cmd_sweep(Options o) {
  if (o.values.empty()) die(2, "sweep: --values is required");
  std::ostringstream body;
  body << "param,measured,predicted,ratio\n";
  for (const double val : o.values) {
    Options run = o;
    double tau = o.tau;
    if (o.sweep_param == "A") {
      if (run.system == "free" && run.scheme != "gaussian")
        die(2, "sweep A: requires the gaussian scheme (or --system iho)");
      run.A = val;
    } else if (o.sweep_param == "delta") {
      if (run.system != "free" || run.scheme != "window")
        die(2, "sweep delta: requires the free window scheme");
      const double mid = 0.5 * (o.k0 + o.k1);
      run.k0 = mid - val;
      run.k1 = mid + val;
    } else if (o.sweep_param == "tau") {
      tau = val;
    } else {
      die(2, "sweep: unknown parameter '" + o.sweep_param +
                 "' (expected A, delta or tau)");
    }
    if (val <= 0.0 && o.sweep_param != "tau")
      die(2, "sweep: values must be positive");
    const ccs_family fam = make_family(run);
    const double ktilde = run.scheme == "gaussian"
                              ? run.kbar
                              : 0.5 * (run.k0 + run.k1);  // ell = 0 midpoint
    double measured, predicted;
    check(ccs_stability(&fam, run.q, run.p, tau, ktilde, &measured,
                        &predicted));
    const double ratio = predicted != 0.0 ? measured / predicted
                                          : (measured == 0.0 ? 1.0 : 0.0);
    body << num(val) << "," << num(measured) << "," << num(predicted) << ","
         << num(ratio) << "\n";
  }
  write_output(o, body.str());
}

void cmd_action(const Options& o) {
  const ccs_family fam = make_family(o);
  double q, p, energy;
  check(ccs_action_solve(&fam, o.J, o.omega, &q, &p, &energy));
  std::ostringstream body;
  if (o.format == "json")
    body << "{\"J\":" << num(o.J) << ",\"omega\":" << num(o.omega)
         << ",\"q\":" << num(q) << ",\"p\":" << num(p)
         << ",\"energy\":" << num(energy)
         << ",\"omega_J\":" << num(o.omega * o.J) << "}\n";
  else
    body << "J,omega,q,p,energy,omega_J\n"
         << num(o.J) << "," << num(o.omega) << "," << num(q) << "," << num(p)
         << "," << num(energy) << "," << num(o.omega * o.J) << "\n";
  write_output(o, body.str());
}

}  // namespace

int main(int argc, char** argv) {
  std::setlocale(LC_ALL, "C");
  Options o;
  CLI::App app{"Coherent states for continuous spectra: evaluation, axiom "
               "verification, sweeps"};
  app.set_config("--config", "", "key=value configuration file");
  app.add_option("--system", o.system, "free | iho")
      ->check(CLI::IsMember({"free", "iho"}));
  app.add_option("--scheme", o.scheme, "window | gaussian | bump (free only)")
      ->check(CLI::IsMember({"window", "gaussian", "bump"}));
  app.add_option("--hbar", o.hbar);
  app.add_option("--mass", o.mass);
  app.add_option("--omega", o.omega);
  app.add_option("--k0", o.k0);
  app.add_option("--k1", o.k1);
  app.add_option("--kbar", o.kbar);
  app.add_option("--A", o.A);
  app.add_option("--ebar", o.ebar);
  app.add_option("--q", o.q);
  app.add_option("--p", o.p);
  app.add_option("--tau", o.tau);
  app.add_option("--grid", o.grid, "xmin:xmax:n");
  app.add_option("--out", o.out, "output path (default stdout)");
  app.add_option("--format", o.format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--tol", o.tol);

  auto* fid = app.add_subcommand("fiducial", "fiducial wavefunction on a grid");
  auto* coh = app.add_subcommand("coherent", "coherent state |q,p,tau>");
  auto* evo = app.add_subcommand("evolve", "coherent state evolved by tau");
  auto* mom = app.add_subcommand("moments", "norm, Q/P moments, energy");
  auto* ver = app.add_subcommand("verify", "axiom verification reports");
  ver->add_option("--axiom", o.axiom,
                  "all | normalization | continuity | identity_resolution | "
                  "temporal_stability | action_identity");
  auto* swp = app.add_subcommand("sweep", "stability deviation sweep");
  swp->add_option("--sweep", o.sweep_param, "A | delta | tau");
  swp->add_option("--values", o.values, "sweep values")->delimiter(',');
  auto* act = app.add_subcommand("action", "solve <H>(q,p) = omega J");
  act->add_option("--J", o.J, "action value");
  app.require_subcommand(1);
  // common flags may follow the subcommand name
  for (auto* sub : {fid, coh, evo, mom, ver, swp, act}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    if (fid->parsed()) cmd_grid_dump(o, 0.0, 0.0, 0.0);
    else if (coh->parsed() || evo->parsed()) cmd_grid_dump(o, o.q, o.p, o.tau);
    else if (mom->parsed()) cmd_moments(o);
    else if (ver->parsed()) return cmd_verify(o);
    else if (swp->parsed()) cmd_sweep(o);
    else if (act->parsed()) cmd_action(o);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.msg << "\n";
    return e.code;
  }
  return 0;
}
