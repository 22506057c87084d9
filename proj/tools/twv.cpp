// twv: twisted Alexander invariants and volume estimates from the command line.

#include <iostream>

#include <CLI11.hpp>

#include "twv/cli_io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Twisted Alexander invariants of link groups and hyperbolic volume estimates"};
  app.require_subcommand(1);

  twv::VerifyOptions verify;
  auto* v = app.add_subcommand("verify", "check the presentation and the lifted holonomy representations");
  v->add_option("input", verify.input, "document path or built-in example name")->required();
  v->add_option("--n", verify.dims, "dimensions to check")->delimiter(',');
  v->add_option("--signs", verify.signs, "sign assignments such as + or +-")->delimiter(',');
  v->add_option("--branch", verify.branch, "holonomy branch index");
  v->add_option("--tol", verify.tol, "residual tolerance");

  twv::InvariantOptions inv;
  auto* i = app.add_subcommand("invariant", "print Delta_n as num/den or its limit at a point");
  i->add_option("input", inv.input, "document path or built-in example name")->required();
  i->add_option("--n", inv.n, "dimension of the symmetric power");
  i->add_option("--signs", inv.signs, "sign assignment, default all +");
  i->add_option("--branch", inv.branch, "holonomy branch index");
  i->add_option("--print", inv.print, "poly or value")->check(CLI::IsMember({"poly", "value"}));
  i->add_option("--at", inv.at, "1, -1 or k/m for exp(2 pi i k/m)");
  i->add_option("--precision", inv.precision, "auto, f64, dd or mp<bits>");
  i->add_option("--digits", inv.digits, "significant digits printed");

  twv::VolumeOptions vol;
  int n_min = 0;
  int n_max = 0;
  std::string parity;
  std::string at;
  std::string mode;
  auto* s = app.add_subcommand("volume", "volume estimator series 4 pi log|A_n| / n^2");
  s->add_option("input", vol.input, "document path or built-in example name")->required();
  auto* nmin_opt = s->add_option("--nmin", n_min, "smallest dimension");
  auto* nmax_opt = s->add_option("--nmax", n_max, "largest dimension");
  s->add_option("--n", vol.n_values, "explicit dimensions, overriding --nmin/--nmax")->delimiter(',');
  auto* parity_opt = s->add_option("--parity", parity, "even, odd or both");
  auto* at_opt = s->add_option("--at", at, "1, -1 or k/m for exp(2 pi i k/m)");
  auto* mode_opt = s->add_option("--mode", mode, "ratio, plain (alias tilde)");
  s->add_option("--signs", vol.signs, "sign assignments, or all")->delimiter(',');
  s->add_option("--branch", vol.branch, "holonomy branch index");
  s->add_flag("--accel", vol.accelerate, "add Aitken delta^2 extrapolation, labelled as such");
  s->add_option("--precision", vol.precision, "auto, f64, dd or mp<bits>");
  s->add_flag("--certify", vol.certify, "recompute each row one precision rung higher");
  s->add_flag("--exploratory", vol.exploratory, "allow roots of unity other than +-1");
  s->add_option("--csv", vol.csv_path, "write CSV to this file, - for stdout instead of the table");

  twv::ExamplesOptions ex;
  auto* e = app.add_subcommand("examples", "list or emit the built-in example documents");
  e->add_option("action", ex.action, "list or emit")->check(CLI::IsMember({"list", "emit"}));
  e->add_option("name", ex.name, "example to emit");
  e->add_option("-o,--output", ex.output, "output file, default stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : twv::kExitInput;
  }

  if (v->parsed()) return twv::cmd_verify(verify, std::cout, std::cerr);
  if (i->parsed()) return twv::cmd_invariant(inv, std::cout, std::cerr);
  if (e->parsed()) return twv::cmd_examples(ex, std::cout, std::cerr);
  if (*nmin_opt) vol.n_min = n_min;
  if (*nmax_opt) vol.n_max = n_max;
  if (*parity_opt) vol.parity = parity;
  if (*at_opt) vol.at = at;
  if (*mode_opt) vol.mode = mode;
  return twv::cmd_volume(vol, std::cout, std::cerr);
}
