#include "paultrap/cli/app.hpp"

#include <CLI11.hpp>

#include "paultrap/cli/figures.hpp"
#include "paultrap/cli/run.hpp"
#include "paultrap/dynamics.hpp"
#include "paultrap/effective_potential.hpp"
#include "paultrap/fields/geometry_io.hpp"
#include "paultrap/thermo.hpp"

namespace paultrap::cli {

namespace {

int physics_error(std::ostream& err, const char* kind, const std::exception& e) {
  err << "error: physics\n  kind: " << kind << "\n  detail: " << e.what() << "\n";
  return kPhysics;
}

// Schema problems exit 2, physics problems 3.
template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << "\n";
    return kSchema;
  } catch (const ValidityError& e) {
    return physics_error(err, "lamb-dicke validity", e);
  } catch (const StabilityError& e) {
    return physics_error(err, "instability", e);
  } catch (const NoTrapError& e) {
    return physics_error(err, "no trap", e);
  } catch (const AccuracyError& e) {
    return physics_error(err, "accuracy", e);
  } catch (const ResolutionError& e) {
    return physics_error(err, "resolution", e);
  } catch (const NumericalError& e) {
    return physics_error(err, "numerical", e);
  } catch (const DomainError& e) {
    err << "error: invalid input: " << e.what() << "\n";
    return kSchema;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kPhysics;
  }
}

int validate_geometry(const std::string& path, std::ostream& out, std::ostream& err) {
  const auto g = load_geometry(path);
  const auto d = diagnose(g);
  out << "geometry: " << g.name << " (" << path << ")\n";
  out << "electrodes: " << g.electrodes.size() << " (" << d.rf_electrodes << " RF, " << d.dc_electrodes << " DC)\n";
  out << "characteristic distance: " << g.characteristic_distance * 1e6 << " um\n";
  out << "panels: " << d.quality.panel_count << ", area " << d.quality.min_area * 1e12 << " to "
      << d.quality.max_area * 1e12 << " um^2, max aspect " << d.quality.max_aspect << ", max non-planarity "
      << d.quality.max_non_planarity << "\n";
  for (const auto& w : d.warnings) out << "warning: " << w << "\n";
  for (const auto& e : d.errors) err << "error: " << e << "\n";
  out << (d.ok ? "ok\n" : "failed\n");
  return d.ok ? kOk : kSchema;
}

}  // namespace

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Paul trap modelling: fields, stability, dynamics, cooling and figure reproduction", "paultrap"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tool_version());

  std::string config, out_dir, target, geometry, format = "csv";
  unsigned workers = 0;
  auto add_common = [&](CLI::App* s) {
    s->add_option("--out", out_dir, "output directory");
    s->add_option("--workers", workers, "worker threads (results do not depend on it)")->check(CLI::Range(1u, 256u));
    s->add_option("--format", format, "output format")->check(CLI::IsMember({"csv"}));
  };
  auto* run_cmd = app.add_subcommand("run", "run the analyses of a configuration file");
  run_cmd->add_option("--config", config, "configuration file (YAML)")->required();
  add_common(run_cmd);
  auto* rep = app.add_subcommand("reproduce", "reproduce a figure and check its acceptance bands");
  rep->add_option("target", target, "fig2a, fig2b, fig4 or fig5a")->required()->check(CLI::IsMember(reproduce_targets()));
  add_common(rep);
  auto* val = app.add_subcommand("validate", "check a geometry file");
  val->add_option("geometry", geometry, "geometry file (YAML)");
  val->add_option("--config", geometry, "geometry file (YAML)");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << tool_version() << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kUsage;
  }

  if (*val) {
    if (geometry.empty()) {
      err << "error: validate needs a geometry file\n";
      return kUsage;
    }
    return guarded(err, [&] { return validate_geometry(geometry, out, err); });
  }

  if (*run_cmd) {
    return guarded(err, [&] {
      auto cfg = load_run_config(config);
      if (workers > 0) cfg.workers = workers;
      const auto bundle = run(cfg);
      const std::string dir = out_dir.empty() ? cfg.output : out_dir;
      write_bundle(bundle, dir);
      for (const auto& l : bundle.results) out << l << "\n";
      out << "wrote " << bundle.files.size() << " CSV files and summary.txt to " << dir << "\n";
      return static_cast<int>(kOk);
    });
  }

  return guarded(err, [&] {
    const auto r = reproduce(target, workers > 0 ? workers : 1);
    const std::string dir = out_dir.empty() ? target : out_dir;
    write_bundle(r.bundle, dir);
    for (const auto& l : r.bundle.results) out << l << "\n";
    if (r.pass()) return static_cast<int>(kOk);
    err << "check failed for " << target << ":\n";
    for (const auto& b : r.bands)
      if (!b.pass()) err << "  " << b.describe() << "\n";
    return static_cast<int>(kCheckFailed);
  });
}

}  // namespace paultrap::cli
