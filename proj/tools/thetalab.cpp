// thetalab <kind> [options]: runs one verification job and writes its report.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "thetalab/cli.hpp"

int main(int argc, char** argv) {
  using namespace thetalab;
  cli::VerificationJob job;
  std::string pair;
  std::size_t genus = 0, max_genus = 0;
  std::int64_t trace_bound = 0, norm_bound = 0;
  std::string tset, out;

  CLI::App app{"Exact theta-series coefficients of even unimodular lattices"};
  app.add_option("kind", job.kind, "validate | shells | theta | diff | product | restrict | "
                                   "venkov | heat | witt | schottky | a4-separation | "
                                   "k-identity | independence | hyp-predicate | registry")
      ->required();
  app.add_option("--lattice", job.lattices, "built-in lattice name (repeatable)");
  app.add_option("--spec", job.specs, "lattice spec file (repeatable)");
  auto* o_pair = app.add_option("--pair", pair, "two lattice names, A:B");
  auto* o_genus = app.add_option("--genus", genus, "genus g");
  auto* o_max = app.add_option("--max-genus", max_genus, "largest genus scanned");
  auto* o_trace = app.add_option("--trace-bound", trace_bound, "bound on trace(T)");
  auto* o_norm = app.add_option("--norm-bound", norm_bound, "bound on Q(v, v)");
  auto* o_tset = app.add_option("--tset", tset, "T_set file of target Gram matrices");
  app.add_option("--jobs", job.jobs, "worker threads")->check(CLI::PositiveNumber);
  auto* o_out = app.add_option("--out", out, "report file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kBadInput;
  }

  try {
    if (*o_pair) job.pair = cli::parse_pair(pair);
  } catch (const Error& e) {
    std::cerr << "thetalab: " << e.what() << "\n";
    return cli::kBadInput;
  }
  if (*o_genus) job.genus = genus;
  if (*o_max) job.max_genus = max_genus;
  if (*o_trace) job.trace_bound = trace_bound;
  if (*o_norm) job.norm_bound = norm_bound;
  if (*o_tset) job.tset = tset;
  if (*o_out) job.out = out;

  const cli::Report rep = cli::run(job);
  const std::string text = rep.text();
  if (job.out) {
    std::ofstream f(*job.out, std::ios::binary);
    if (!(f << text)) {
      std::cerr << "thetalab: cannot write " << *job.out << "\n";
      return cli::kBadInput;
    }
  } else {
    std::cout << text;
  }

  char line[160];
  std::snprintf(line, sizeof line, "thetalab: %s %s in %.3f s", job.kind.c_str(),
                rep.body.value("status", std::string("?")).c_str(), rep.stats.seconds);
  std::cerr << line;
  if (rep.stats.cache_enabled)
    std::cerr << "; cache hits " << rep.stats.cache.hits << ", misses " << rep.stats.cache.misses
              << ", writes " << rep.stats.cache.writes;
  std::cerr << "\n";
  if (rep.body.contains("error")) std::cerr << "thetalab: " << rep.body["error"].get<std::string>() << "\n";
  return rep.exit_code;
}
