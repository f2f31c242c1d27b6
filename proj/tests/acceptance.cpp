// Runs the eleven acceptance checks and prints one PASS/FAIL line for each.
// Exit status is 0 only when every check passes.

#include <array>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "thetalab/cli.hpp"

using namespace thetalab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

cli::Report run_job(cli::VerificationJob job) { return cli::run(job); }

cli::VerificationJob job_of(const std::string& kind) {
  cli::VerificationJob j;
  j.kind = kind;
  return j;
}

bool passed(const cli::Report& r) { return r.body.value("status", "") == "pass"; }

std::string first_error(const cli::Report& r) {
  return r.body.contains("error") ? r.body["error"].get<std::string>() : std::string();
}

// --- 1 ---------------------------------------------------------------------

Outcome lattice_suite() {
  std::ostringstream msg;
  bool ok = true;
  std::vector<std::string> names{"E8", "E8^2", "D16+"};
  for (const auto& n : rank24_names()) names.push_back(n);
  std::map<std::string, BigInt> roots;
  for (const auto& name : names) {
    LatticeContext ctx(builtin_lattice(name));
    const ValidationReport v = validate(ctx);
    const RootSystemReport rs = root_system(ctx);
    const std::string want = name == "D16+" ? "D16" : name;
    roots[name] = rs.root_count;
    if (!v.ok() || rs.label() != want) {
      ok = false;
      msg << name << " gives " << rs.label() << (v.ok() ? "" : " (invalid)") << "; ";
    }
    if (ctx.rank() == 24 && rs.root_count != 24 * rs.common_coxeter_number()) {
      ok = false;
      msg << name << " roots != 24h; ";
    }
  }
  const std::map<std::string, std::int64_t> table{
      {"A5^4D4", 144}, {"A9^2D6", 240}, {"E6^4", 288}, {"A17E7", 432}, {"D16E8", 720}};
  for (const auto& [a, b] : rank24_pairs()) {
    if (roots[a] != roots[b] || roots[a] != table.at(a)) {
      ok = false;
      msg << a << "/" << b << " roots " << roots[a] << "/" << roots[b] << "; ";
    }
  }
  if (ok) msg << names.size() << " lattices valid; pair roots 144 240 288 432 720";
  return {ok, msg.str()};
}

// --- 2, 11 -----------------------------------------------------------------

struct WittRuns {
  Outcome witt;
  Outcome identical;
  Outcome warm;
};

WittRuns witt_runs(const fs::path& cache_dir) {
  WittRuns out;
  fs::remove_all(cache_dir);
  setenv("THETALAB_CACHE", cache_dir.c_str(), 1);
  cli::VerificationJob job = job_of("witt");
  auto t0 = Clock::now();
  const cli::Report cold = run_job(job);
  const double cold_s = seconds_since(t0);
  t0 = Clock::now();
  const cli::Report warm = run_job(job);
  const double warm_s = seconds_since(t0);
  unsetenv("THETALAB_CACHE");
  job.jobs = 8;
  const cli::Report eight = run_job(job);

  std::ostringstream w;
  if (passed(cold)) {
    w << "E8^2 and D16+ agree:";
    for (const auto& row : cold.body["payload"]["genera"])
      w << " g" << row["genus"].get<int>() << " trace<=" << row["trace_bound"].get<int>() << " ("
        << row["coefficients"].get<int>() << " coefficients)";
  } else {
    w << "status " << cold.body.value("status", "?") << " " << first_error(cold);
  }
  out.witt = {passed(cold), w.str()};

  const bool same = cold.text() == eight.text() && cold.text() == warm.text();
  out.identical = {same, same ? "witt reports identical for jobs 1, jobs 8 and warm cache"
                              : "witt reports differ between runs"};
  const double ratio = warm_s > 0 ? cold_s / warm_s : 1e9;
  char buf[160];
  std::snprintf(buf, sizeof buf, "cold %.2f s, warm %.3f s, speedup %.0fx, hits %llu", cold_s,
                warm_s, ratio, static_cast<unsigned long long>(warm.stats.cache.hits));
  out.warm = {ratio >= 5.0 && warm.stats.cache.hits > 0, buf};
  return out;
}

// --- 3 ---------------------------------------------------------------------

Outcome genus_four_witness() {
  const cli::Report r = run_job(job_of("schottky"));
  if (!passed(r)) return {false, "no curated target separates E8^2 and D16+ " + first_error(r)};
  const auto& w = r.body["payload"]["witness"];
  std::int64_t max_trace = 0;
  bool genus_four = true;
  for (const auto& c : curated_tset()) {
    max_trace = std::max(max_trace, c.trace());
    genus_four = genus_four && c.genus() == 4;
  }
  std::ostringstream msg;
  msg << "witness " << w["target"].get<std::string>() << ": " << w["first"].get<std::string>()
      << " vs " << w["second"].get<std::string>() << " (curated traces <= " << max_trace << ")";
  return {max_trace <= 8 && genus_four, msg.str()};
}

// --- 4 ---------------------------------------------------------------------

Outcome a4_separation() {
  const cli::Report r = run_job(job_of("a4-separation"));
  std::ostringstream msg;
  if (r.body.contains("error")) return {false, first_error(r)};
  for (const auto& row : r.body["payload"]["pairs"]) {
    msg << row["first"]["name"].get<std::string>() << " " << row["a4_first"].get<std::string>()
        << " vs " << row["a4_second"].get<std::string>()
        << (row["shells_equal"].get<bool>() ? "" : " (shells differ)") << "; ";
  }
  msg << "shells equal to norm " << r.body["payload"]["norm_bound"].get<int>();
  return {passed(r), msg.str()};
}

// --- 5 ---------------------------------------------------------------------

Outcome k_identity() {
  const cli::Report r = run_job(job_of("k-identity"));
  if (r.body.contains("error")) return {false, first_error(r)};
  std::ostringstream msg;
  msg << "k =";
  for (const auto& row : r.body["payload"]["pairs"])
    msg << " " << row["k"].get<std::string>() << (row["verified"].get<bool>() ? "" : "(!)");
  msg << " on " << curated_tset().size() << " targets";
  return {passed(r), msg.str()};
}

// --- 6, 11 -----------------------------------------------------------------

struct VenkovRuns {
  Outcome venkov;
  Outcome identical;
  std::optional<Rational> constant;
};

VenkovRuns venkov_runs() {
  VenkovRuns out;
  cli::VerificationJob job = job_of("venkov");
  const cli::Report one = run_job(job);
  job.jobs = 8;
  const cli::Report eight = run_job(job);
  const auto& p = one.body["payload"];
  std::ostringstream msg;
  if (one.body.contains("error")) {
    out.venkov = {false, first_error(one)};
  } else {
    const bool ok = passed(one) && p["lattices"].size() >= 9;
    if (ok) out.constant = Rational(p["constant"].get<std::string>());
    msg << "c = " << p["constant"].get<std::string>() << " on " << p["lattices"].size()
        << " lattices, every v with Q(v,v) <= " << p["norm_bound"].get<int>()
        << "; printed reference " << p["reference_constant"].get<std::string>()
        << (p["reference_matches"].get<bool>() ? " matches" : " does not match");
    out.venkov = {ok, msg.str()};
  }
  const bool same = one.text() == eight.text();
  out.identical = {same, same ? "venkov reports identical for jobs 1 and 8"
                              : "venkov reports differ between jobs 1 and 8"};
  return out;
}

// --- 7 ---------------------------------------------------------------------

Outcome heat(const std::optional<Rational>& c) {
  if (!c) return {false, "no uniform constant from the proportionality check"};
  std::size_t rows = 0, failed = 0;
  for (const auto& name : rank24_names()) {
    LatticeContext ctx(builtin_lattice(name));
    for (std::size_t g = 1; g <= 2; ++g)
      for (const HeatRow& r : heat_check_all(ctx, g, 4, *c)) {
        ++rows;
        if (!r.holds) ++failed;
      }
  }
  std::ostringstream msg;
  msg << rows << " rows over " << rank24_names().size() << " lattices, g <= 2, trace <= 4, c = "
      << c->str() << ", " << failed << " failed";
  return {failed == 0 && rows > 0, msg.str()};
}

// --- 8 ---------------------------------------------------------------------

Outcome ring_structure() {
  LatticeContext e8(root_lattice('E', 8)), e8sq(builtin_lattice("E8^2")),
      d16(builtin_lattice("D16+"));
  bool ok = true;
  std::size_t coeffs = 0;
  for (std::size_t g = 0; g <= 2; ++g) {
    const ThetaTruncation f = theta_truncated(e8, g, 6);
    const ThetaTruncation sq = theta_truncated(e8sq, g, 6);
    const ThetaTruncation prod = series_product(f, f);
    ok = ok && prod.coeffs == sq.coeffs;
    for (const auto& [t, c] : sq.coeffs) ok = ok && series_product_at(f, f, t) == c;
    coeffs += sq.coeffs.size();
  }
  std::size_t blocks = 0;
  const std::vector<GramTarget> small{GramTarget::diagonal({0}), GramTarget::diagonal({2}),
                                      GramTarget::diagonal({4})};
  for (LatticeContext* ctx : {&e8, &d16})
    for (const auto& t1 : small)
      for (const auto& t2 : small) {
        ok = ok && block_factorization_check(*ctx, t1, t2).holds();
        ++blocks;
      }
  std::ostringstream msg;
  msg << coeffs << " product coefficients, " << blocks << " block factorizations";
  return {ok, msg.str()};
}

// --- 9 ---------------------------------------------------------------------

Outcome siegel() {
  bool ok = true;
  std::ostringstream msg;
  for (const auto& [name, bound] :
       std::vector<std::pair<std::string, std::int64_t>>{{"E8", 6}, {"D16+", 6}, {"D4^6", 4}}) {
    LatticeContext ctx(builtin_lattice(name));
    for (std::size_t g = 0; g <= 2; ++g) {
      const bool eq = siegel_restrict(theta_truncated(ctx, g + 1, bound)).coeffs ==
                      theta_truncated(ctx, g, bound).coeffs;
      ok = ok && eq;
      if (!eq) msg << name << " g" << g << " differs; ";
    }
    msg << name << " trace<=" << bound << "; ";
  }
  msg << "g in {0,1,2}";
  return {ok, msg.str()};
}

// --- 10 --------------------------------------------------------------------

Outcome predicate() {
  bool ok = stable_eq_hyp_predicate(builtin_lattice("E8^2"), builtin_lattice("D16+"));
  for (const auto& [a, b] : rank24_pairs())
    ok = ok && !stable_eq_hyp_predicate(builtin_lattice(a), builtin_lattice(b));
  return {ok, "true for (E8^2, D16+), false for the five rank-24 pairs"};
}

// --- 11: brute-force shells --------------------------------------------------

std::map<std::int64_t, std::uint64_t> box_counts(const IntMatrix& g, int r, std::int64_t bound) {
  const std::size_t n = g.rows();
  std::vector<int> x(n, -r);
  std::map<std::int64_t, std::uint64_t> out;
  while (true) {
    std::int64_t q = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) q += x[i] * to_int64(g(i, j)) * x[j];
    if (q <= bound) ++out[q];
    std::size_t k = 0;
    while (k < n && x[k] == r) x[k++] = -r;
    if (k == n) break;
    ++x[k];
  }
  return out;
}

// Smallest box radius holding every vector of norm <= bound: sqrt(bound * (G^-1)_ii).
int box_radius(const IntMatrix& g, std::int64_t bound) {
  const RatMatrix inv = inverse_rational(to_rational(g));
  int r = 0;
  for (std::size_t i = 0; i < g.rows(); ++i)
    while (Rational(r * r) < bound * inv(i, i)) ++r;
  return r;
}

// E8 as doubled coordinates y in Z^8: all even or all odd, sum divisible by 4.
std::map<std::int64_t, std::uint64_t> e8_model_counts(std::int64_t bound) {
  std::map<std::int64_t, std::uint64_t> out;
  std::array<int, 8> y{};
  std::function<void(int, int)> rec = [&](int i, int sq) {
    if (sq > 4 * bound) return;
    if (i == 8) {
      int sum = 0;
      for (int v : y) {
        if ((v & 1) != (y[0] & 1)) return;
        sum += v;
      }
      if (sum % 4 == 0) ++out[sq / 4];
      return;
    }
    for (int v = -6; v <= 6; ++v) {
      y[i] = v;
      rec(i + 1, sq + v * v);
    }
  };
  rec(0, 0);
  return out;
}

Outcome shell_oracle() {
  const std::int64_t bound = 8;
  bool ok = true;
  std::ostringstream msg;
  auto compare = [&](const std::string& name, const Lattice& l,
                     const std::map<std::int64_t, std::uint64_t>& want) {
    const ShellTable t = enumerate_shells(l, bound);
    for (std::int64_t m = 0; m <= bound; ++m) {
      const auto it = want.find(m);
      if (t.count(m) != (it == want.end() ? 0 : it->second)) {
        ok = false;
        msg << name << " norm " << m << " differs; ";
      }
    }
  };
  for (const auto& [type, rank] : std::vector<std::pair<char, int>>{{'A', 1}, {'A', 2}, {'D', 4}}) {
    const Lattice l = root_lattice(type, rank);
    compare(type + std::to_string(rank), l, box_counts(l.gram(), box_radius(l.gram(), bound), bound));
  }
  compare("E8", root_lattice('E', 8), e8_model_counts(bound));
  if (ok) msg << "A1 A2 D4 E8 agree with brute force to norm 8";
  return {ok, msg.str()};
}

void print(int n, const Outcome& o, double secs) {
  std::printf("criterion %2d %s: %s (%.1f s)\n", n, o.pass ? "PASS" : "FAIL", o.detail.c_str(),
              secs);
  std::fflush(stdout);
}

}  // namespace

int main() {
  unsetenv("THETALAB_CACHE");
  const fs::path cache_dir = fs::temp_directory_path() / "thetalab_acceptance_cache";
  bool all = true;
  auto timed = [&](int n, const std::function<Outcome()>& f) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    print(n, o, seconds_since(t0));
    all = all && o.pass;
    return o;
  };

  timed(1, lattice_suite);
  WittRuns w;
  timed(2, [&] {
    w = witt_runs(cache_dir);
    return w.witt;
  });
  timed(3, genus_four_witness);
  timed(4, a4_separation);
  timed(5, k_identity);
  VenkovRuns v;
  timed(6, [&] {
    v = venkov_runs();
    return v.venkov;
  });
  timed(7, [&] { return heat(v.constant); });
  timed(8, ring_structure);
  timed(9, siegel);
  timed(10, predicate);
  timed(11, [&] {
    const Outcome oracle = shell_oracle();
    Outcome o;
    o.pass = w.identical.pass && v.identical.pass && w.warm.pass && oracle.pass;
    o.detail = w.identical.detail + "; " + v.identical.detail + "; " + w.warm.detail + "; " +
               oracle.detail;
    return o;
  });
  fs::remove_all(cache_dir);
  std::printf("acceptance: %s\n", all ? "all criteria pass" : "some criteria FAIL");
  return all ? 0 : 1;
}
