// Command-line front end: characteristic-function and filtered-P grids,
// nonclassicality reports, Fock diagonals of generator series, the
// acceptance suite and the figure-1 cut files.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "phasespace/charfn.hpp"
#include "phasespace/deltaseries.hpp"
#include "phasespace/errors.hpp"
#include "phasespace/filters.hpp"
#include "phasespace/io.hpp"
#include "phasespace/witness.hpp"
#include "suite.hpp"

namespace {

using namespace phasespace;
using io::json;

constexpr int kConfigError = 2;
constexpr int kVerifyFailed = 1;

struct Options {
  std::string state;
  std::string grid;
  double w = 2.0;
  double s = 1.0;
  std::string out;
  std::string format;
  std::string cut;
  double tolerance = 1e-6;
  int kmax = 3;
  bool timings = false;
};

std::string slurp(std::istream& in) {
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// --state takes inline JSON, @path, or nothing / "-" for stdin.
StateSpec read_state(const std::string& arg) {
  std::string text;
  if (arg.empty() || arg == "-") {
    text = slurp(std::cin);
  } else if (arg.front() == '@') {
    std::ifstream in(arg.substr(1), std::ios::binary);
    if (!in) throw ParameterError("cannot read state file " + arg.substr(1));
    text = slurp(in);
  } else {
    text = arg;
  }
  return io::state_spec_from_json(json::parse(text));
}

PhaseGrid parse_grid(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw ParameterError("--grid expects L,N");
  double extent = 0.0;
  int n = 0;
  const char* first = text.data();
  const char* mid = first + comma;
  const char* last = first + text.size();
  const auto a = std::from_chars(first, mid, extent);
  const auto b = std::from_chars(mid + 1, last, n);
  if (a.ec != std::errc{} || a.ptr != mid || b.ec != std::errc{} || b.ptr != last) {
    throw ParameterError("--grid expects L,N, got '" + text + "'");
  }
  if (!(extent > 0.0)) throw ParameterError("grid extent must be > 0");
  if (n < 3 || n % 2 == 0) throw ParameterError("grid resolution must be odd and >= 3");
  return PhaseGrid(extent, n);
}

void check_format(const std::string& format, std::initializer_list<const char*> allowed) {
  for (const char* f : allowed)
    if (format == f) return;
  throw ParameterError("format '" + format + "' is not available for this command");
}

void emit(const std::string& path, const std::function<void(std::ostream&)>& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParameterError("cannot write " + path);
  write(out);
  if (!out) throw ParameterError("write to " + path + " failed");
}

json grid_json(const PhaseGrid& g) { return json::array({g.extent(), g.resolution()}); }

json field_rows(const PhaseField& field) {
  json rows = json::array();
  const PhaseGrid& g = field.grid();
  const auto values = field.values();
  for (int i = 0; i < g.resolution(); ++i) {
    for (int j = 0; j < g.resolution(); ++j) {
      const PhasePoint pt = g.point(i, j);
      const cplx v = values[g.index(i, j)];
      rows.push_back({pt.x, pt.p, v.real(), v.imag()});
    }
  }
  return rows;
}

/// Cut through the origin: "re" runs along Re α at Im α = 0, "im" along
/// Im α at Re α = 0.
io::CutTable cut_table(const PhaseField& field, const std::string& axis) {
  const PhaseGrid& g = field.grid();
  const int mid = (g.resolution() - 1) / 2;
  io::CutTable table{{"t", "value"}, {}};
  for (int k = 0; k < g.resolution(); ++k) {
    const cplx v = axis == "re" ? field.at(k, mid) : field.at(mid, k);
    table.rows.push_back({g.coord(k), v.real()});
  }
  return table;
}

void write_json(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

int run_charfn(const Options& o) {
  check_format(o.format, {"csv", "json"});
  const StateSpec spec = read_state(o.state);
  const PhaseGrid grid = parse_grid(o.grid);
  const json config{{"command", "charfn"}, {"state", io::to_json(spec)}, {"grid", grid_json(grid)},
                    {"s", o.s}};
  const std::string hash = io::config_hash(config);
  const PhaseField field = CharFn{make_state(spec), o.s}.field(grid).sample();
  emit(o.out, [&](std::ostream& out) {
    if (o.format == "csv") {
      io::write_grid_csv(out, field, "charfn", hash);
    } else {
      write_json(out, {{"config", config}, {"config_hash", hash}, {"columns", {"x", "p", "re", "im"}},
                       {"rows", field_rows(field)}});
    }
  });
  return 0;
}

int run_filtered(const Options& o) {
  check_format(o.format, {"csv", "json"});
  if (!o.cut.empty() && o.cut != "re" && o.cut != "im") {
    throw ParameterError("--cut takes re or im");
  }
  const StateSpec spec = read_state(o.state);
  const PhaseGrid grid = parse_grid(o.grid);
  json config{{"command", "filtered"}, {"state", io::to_json(spec)}, {"grid", grid_json(grid)},
              {"w", o.w}};
  if (!o.cut.empty()) config["cut"] = o.cut;
  const std::string hash = io::config_hash(config);
  const FilteredP filtered = filtered_p_numeric(make_state(spec), FilterKernel::box(o.w), grid);
  emit(o.out, [&](std::ostream& out) {
    if (!o.cut.empty()) {
      const io::CutTable table = cut_table(filtered.field, o.cut);
      if (o.format == "csv") {
        io::write_cut_csv(out, table, "filtered cut=" + o.cut, hash);
      } else {
        write_json(out, {{"config", config}, {"config_hash", hash}, {"columns", table.columns},
                         {"rows", table.rows}});
      }
    } else if (o.format == "csv") {
      io::write_grid_csv(out, filtered.field, "filtered", hash);
    } else {
      write_json(out, {{"config", config}, {"config_hash", hash}, {"columns", {"x", "p", "re", "im"}},
                       {"rows", field_rows(filtered.field)}});
    }
  });
  return 0;
}

int run_classify(const Options& o) {
  check_format(o.format, {"json"});
  const StateSpec spec = read_state(o.state);
  ClassifyOptions opts;
  opts.w = o.w;
  opts.alpha_grid = parse_grid(o.grid);
  const json config{{"command", "classify"}, {"state", io::to_json(spec)},
                    {"grid", grid_json(opts.alpha_grid)}, {"w", o.w}};
  json report = io::to_json(classify(make_state(spec), opts));
  report["config_hash"] = io::config_hash(config);
  emit(o.out, [&](std::ostream& out) { write_json(out, report); });
  return 0;
}

int run_fockdiag(const Options& o) {
  check_format(o.format, {"json"});
  if (o.kmax < 0) throw ParameterError("--kmax must be >= 0");
  const StateSpec spec = read_state(o.state);
  const json config{{"command", "fockdiag"}, {"state", io::to_json(spec)}, {"kmax", o.kmax},
                    {"tolerance", o.tolerance}};
  FockDiagonalReport rep = fock_diagonal(generator_series(make_state(spec)), o.kmax);
  rep.routes_agree = true;
  for (std::size_t k = 0; k < rep.fourier.size(); ++k) {
    rep.routes_agree = rep.routes_agree && std::abs(rep.pairing[k] - rep.fourier[k]) <= o.tolerance;
  }
  json out = io::to_json(rep);
  out["config_hash"] = io::config_hash(config);
  emit(o.out, [&](std::ostream& s) { write_json(s, out); });
  return 0;
}

int run_verify(const Options& o) {
  const auto results = acceptance::run_suite(o.timings ? &std::cerr : nullptr);
  const std::string report = acceptance::format_report(results);
  if (!o.out.empty() && o.out != "-") emit(o.out, [&](std::ostream& s) { s << report; });
  std::cout << report;
  return acceptance::all_passed(results) ? 0 : kVerifyFailed;
}

int run_figure1(const Options& o) {
  check_format(o.format, {"csv"});
  const PhaseGrid grid = parse_grid(o.grid);
  const std::filesystem::path dir = o.out.empty() ? "figure1" : o.out;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ParameterError("cannot create " + dir.string() + ": " + ec.message());

  const FilterKernel box = FilterKernel::box(o.w);
  const std::pair<const char*, StateSpec> panels[] = {{"vacuum", StateSpec::vacuum()},
                                                      {"p_max", StateSpec::p_max()},
                                                      {"thermal", StateSpec::thermal(0.5)},
                                                      {"squeezed", StateSpec::squeezed(1.4)}};
  for (const auto& [name, spec] : panels) {
    const json config{{"command", "figure1"}, {"state", io::to_json(spec)},
                      {"grid", grid_json(grid)}, {"w", o.w}};
    const PhaseField field = filtered_p_numeric(make_state(spec), box, grid).field;
    io::CutTable table = cut_table(field, "re");
    if (spec.kind == StateKind::squeezed) {
      const io::CutTable anti = cut_table(field, "im");
      table.columns.push_back("antisqueezed");
      for (std::size_t k = 0; k < table.rows.size(); ++k) table.rows[k].push_back(anti.rows[k][1]);
    }
    emit((dir / (std::string(name) + ".csv")).string(), [&](std::ostream& out) {
      io::write_cut_csv(out, table, std::string("figure1 ") + name, io::config_hash(config));
    });
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase-space distributions: characteristic functions, filtered P and "
               "nonclassicality tests"};
  app.require_subcommand(1);
  Options o;

  auto state_opt = [&](CLI::App* c) {
    c->add_option("--state", o.state, "state JSON, @file, or - for stdin (default stdin)");
  };
  auto out_opt = [&](CLI::App* c, const char* help) { c->add_option("--out", o.out, help); };
  auto w_opt = [&](CLI::App* c) {
    c->add_option("--w", o.w, "filter width")->capture_default_str();
  };

  auto* charfn = app.add_subcommand("charfn", "s-parametrized characteristic function on a beta grid");
  state_opt(charfn);
  charfn->add_option("--grid", o.grid, "grid extent and odd resolution, L,N (default 4,161)");
  charfn->add_option("--s", o.s, "ordering parameter, 1 for normal order")->capture_default_str();
  out_opt(charfn, "output file (default stdout)");
  charfn->add_option("--format", o.format, "csv or json (default csv)");

  auto* filtered = app.add_subcommand("filtered", "box-filtered P on an alpha grid");
  state_opt(filtered);
  filtered->add_option("--grid", o.grid, "grid extent and odd resolution, L,N (default 4,321)");
  w_opt(filtered);
  filtered->add_option("--cut", o.cut, "emit the cut along Re alpha (re) or Im alpha (im)");
  out_opt(filtered, "output file (default stdout)");
  filtered->add_option("--format", o.format, "csv or json (default csv)");

  auto* cls = app.add_subcommand("classify", "nonclassicality battery, JSON report");
  state_opt(cls);
  cls->add_option("--grid", o.grid, "alpha grid for the filtered scan, L,N (default 4,321)");
  w_opt(cls);
  out_opt(cls, "output file (default stdout)");
  cls->add_option("--format", o.format, "json only");

  auto* fockdiag = app.add_subcommand("fockdiag", "Fock diagonal of a generator series, two routes");
  state_opt(fockdiag);
  fockdiag->add_option("--kmax", o.kmax, "largest Fock index")->capture_default_str();
  fockdiag->add_option("--tolerance", o.tolerance, "route agreement tolerance")->capture_default_str();
  out_opt(fockdiag, "output file (default stdout)");
  fockdiag->add_option("--format", o.format, "json only");

  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  out_opt(verify, "also write the report to this file");
  verify->add_flag("--timings", o.timings, "print per-criterion timings to stderr");

  auto* figure1 = app.add_subcommand("figure1", "filtered-P cut files for four states");
  figure1->add_option("--grid", o.grid, "grid extent and odd resolution, L,N (default 4,321)");
  w_opt(figure1);
  out_opt(figure1, "output directory (default figure1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  auto defaults = [&](const char* grid, const char* format) {
    if (o.grid.empty()) o.grid = grid;
    if (o.format.empty()) o.format = format;
  };
  try {
    if (*charfn) {
      defaults("4,161", "csv");
      return run_charfn(o);
    }
    if (*filtered) {
      defaults("4,321", "csv");
      return run_filtered(o);
    }
    if (*cls) {
      defaults("4,321", "json");
      return run_classify(o);
    }
    if (*fockdiag) {
      defaults("", "json");
      return run_fockdiag(o);
    }
    if (*verify) return run_verify(o);
    if (*figure1) {
      defaults("4,321", "csv");
      return run_figure1(o);
    }
  } catch (const json::exception& e) {
    std::cerr << "error: invalid JSON: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kConfigError;
}
