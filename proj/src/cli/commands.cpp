#include "slvd/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "slvd/recognition.hpp"
#include "slvd/render.hpp"

namespace slvd::cli {

GeneratorSet generate_instance(std::size_t n, std::mt19937_64& rng, bool all_active, std::size_t* attempts) {
  constexpr std::size_t kMaxAttempts = 100000;
  for (std::size_t k = 1; k <= kMaxAttempts; ++k) {
    GeneratorSet g = random_generators(n, rng);
    try {
      const SlvdDiagram d = construct_slvd(g);
      if (all_active && d.active.size() != n) continue;
      if (attempts) *attempts = k;
      return g;
    } catch (const Error&) {
    }
  }
  throw Error(Errc::Usage, fmt::format("no admissible set of {} generators in {} draws", n, kMaxAttempts));
}

GeneratorSet bench_instance(std::size_t n, std::mt19937_64& rng) {
  for (;;) {
    GeneratorSet g = random_generators(n, rng, 0.2, 0.2 + 0.2 / static_cast<double>(n));
    try {
      construct_slvd(g);
      return g;
    } catch (const Error&) {
    }
  }
}

Perturbation perturb_vertex(const Tessellation& t, double magnitude, std::mt19937_64& rng) {
  if (!(magnitude > 0) || !std::isfinite(magnitude)) {
    throw Error(Errc::Usage, fmt::format("perturbation magnitude must be positive, got {}", magnitude));
  }
  if (t.vertex_count() == 0) throw Error(Errc::Usage, "tessellation has no vertices");
  std::uniform_int_distribution<int> pick(0, static_cast<int>(t.vertex_count()) - 1);
  std::uniform_real_distribution<double> angle(0.0, 2 * kPi);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const int v = pick(rng);
    const double phi = angle(rng);
    const Vec3& p = t.vertex(v).vec();
    const Vec3 e1 = p.unitOrthogonal();
    const Vec3 e2 = p.cross(e1);
    const Vec3 dir = std::cos(phi) * e1 + std::sin(phi) * e2;
    std::vector<UnitVector> verts = t.vertices();
    verts[static_cast<std::size_t>(v)] = UnitVector::normalize(std::cos(magnitude) * p + std::sin(magnitude) * dir);
    Tessellation moved(std::move(verts), t.faces());
    if (validate(moved).ok()) return {std::move(moved), v};
  }
  throw Error(Errc::InvalidTessellation, "every perturbation drawn broke the tessellation");
}

OracleReport oracle_check(const GeneratorSet& g, std::size_t samples, std::uint64_t rng_seed, double band) {
  const SlvdDiagram d = construct_slvd(g);
  const Tessellation& t = d.tessellation;
  std::vector<std::vector<UnitVector>> polygons;
  polygons.reserve(t.face_count());
  for (int f = 0; f < static_cast<int>(t.face_count()); ++f) polygons.push_back(t.face_polygon(f));

  std::mt19937_64 rng(rng_seed);
  std::vector<UnitVector> points;
  points.reserve(samples);
  for (std::size_t s = 0; s < samples; ++s) points.push_back(random_unit_vector(rng));
  const std::vector<Assignment> truth = brute_force_assign(g, points);

  OracleReport report;
  report.samples = samples;
  for (std::size_t s = 0; s < samples; ++s) {
    int face = -1;
    for (std::size_t f = 0; f < polygons.size() && face < 0; ++f) {
      if (point_in_spherical_polygon(points[s], polygons[f])) face = static_cast<int>(f);
    }
    bool near_boundary = truth[s].boundary;
    if (face >= 0) {
      near_boundary = near_boundary ||
                      distance_to_polygon_boundary(points[s], polygons[static_cast<std::size_t>(face)]) < band;
    } else {
      for (const auto& poly : polygons) near_boundary = near_boundary || distance_to_polygon_boundary(points[s], poly) < band;
    }
    if (near_boundary) {
      ++report.excluded;
      continue;
    }
    if (face < 0 || d.active[static_cast<std::size_t>(face)] != truth[s].generator) ++report.mismatches;
  }
  return report;
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

double median(std::vector<double> xs) {
  const auto mid = xs.begin() + static_cast<std::ptrdiff_t>(xs.size() / 2);
  std::nth_element(xs.begin(), mid, xs.end());
  if (xs.size() % 2) return *mid;
  return 0.5 * (*mid + *std::max_element(xs.begin(), mid));
}

}  // namespace

BenchRow bench_size(std::size_t n, int trials, std::uint64_t rng_seed) {
  if (n < 4) throw Error(Errc::Usage, fmt::format("bench size {} is below 4", n));
  if (trials < 1) throw Error(Errc::Usage, "at least one trial is required");
  BenchRow row;
  row.n = n;
  std::vector<double> construct, propagate, verify, both;
  for (int trial = 0; trial < trials; ++trial) {
    std::seed_seq seq{static_cast<std::uint32_t>(rng_seed), static_cast<std::uint32_t>(rng_seed >> 32),
                      static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(trial)};
    std::mt19937_64 rng(seq);
    const GeneratorSet g = bench_instance(n, rng);

    auto t0 = Clock::now();
    const SlvdDiagram d = construct_slvd(g);
    construct.push_back(elapsed_ms(t0));
    const Tessellation& t = d.tessellation;
    row.vertex_counts.push_back(t.vertex_count());

    t0 = Clock::now();
    std::optional<SeedPlanes> seed;
    for (int v = 0; v < static_cast<int>(t.vertex_count()) && !seed; ++v) {
      try {
        seed = algorithm1_seed(t, default_seed(t, v));
      } catch (const Error&) {
      }
    }
    if (!seed) throw Error(Errc::DegenerateSeed, "no vertex admits a seed construction");
    ConditionedPropagation c = propagate_conditioned(t, *seed);
    propagate.push_back(elapsed_ms(t0));

    t0 = Clock::now();
    const RecognitionResult r = algorithm3_verify(t, std::move(c.pa), 1e-6);
    verify.push_back(elapsed_ms(t0));
    both.push_back(propagate.back() + verify.back());
    row.verified += r.verdict ? 1 : 0;
  }
  row.construct_ms = median(construct);
  row.propagate_ms = median(propagate);
  row.verify_ms = median(verify);
  row.propagate_verify_ms = median(both);
  return row;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Usage, fmt::format("cannot open {}", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(Errc::Usage, fmt::format("cannot write {}", path));
  file << text;
  if (!file) throw Error(Errc::Usage, fmt::format("write to {} failed", path));
}

std::string join(const std::vector<int>& xs) {
  std::string s;
  for (int x : xs) s += fmt::format("{}{}", s.empty() ? "" : " ", x);
  return s.empty() ? "none" : s;
}

struct Options {
  std::string input, gen_input, out, off;
  std::size_t n = 0;
  std::uint64_t rng_seed = 1;
  double eps_rec = 1e-6;
  double magnitude = 0.0;
  std::optional<int> seed_vertex;
  std::optional<int> face_order;
  std::optional<double> qj_param;
  std::optional<double> r_i;
  std::vector<double> p_i;
  std::size_t samples = 100000;
  std::vector<std::size_t> sizes{1000, 10000};
  int trials = 5;
};

int cmd_generate(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.n < 4) {
    err << fmt::format("generate: n must be at least 4, got {}\n", o.n);
    return 2;
  }
  std::mt19937_64 rng(o.rng_seed);
  std::size_t attempts = 0;
  const GeneratorSet g = generate_instance(o.n, rng, false, &attempts);
  write_output(o.out,
               serialize_gen(g, fmt::format("slvd generate n={} rng-seed={} draws={}", o.n, o.rng_seed, attempts)),
               out);
  return 0;
}

int cmd_construct(const Options& o, std::ostream& out, std::ostream& err) {
  const GeneratorSet g = parse_gen(read_file(o.input));
  const SlvdDiagram d = construct_slvd(g);
  const std::string dropped = join(d.dropped);
  write_output(o.out,
               serialize_tes(d.tessellation, fmt::format("slvd construct {}\nfaces follow generators: {}\ndropped: {}",
                                                         o.input, join(d.active), dropped)),
               out);
  if (!o.off.empty()) write_output(o.off, to_off(d.polyhedron), out);
  err << fmt::format("{} faces, {} vertices; dropped generators: {}\n", d.tessellation.face_count(),
                     d.tessellation.vertex_count(), dropped);
  return 0;
}

int cmd_recognize(const Options& o, std::ostream& out, std::ostream& err) {
  const Tessellation t = parse_tes(read_file(o.input));
  const ValidationReport report = validate(t);
  if (!report.ok()) {
    err << "invalid tessellation\n" << report.summary() << '\n';
    return 2;
  }
  std::optional<SeedChoice> choice;
  if (o.seed_vertex || o.face_order || o.qj_param || o.r_i || !o.p_i.empty()) {
    const int v = o.seed_vertex.value_or(0);
    if (v < 0 || v >= static_cast<int>(t.vertex_count())) {
      err << fmt::format("--seed-vertex {} is out of range\n", v);
      return 2;
    }
    choice = default_seed(t, v, o.face_order.value_or(0));
    if (o.qj_param) choice->q_j_param = *o.qj_param;
    if (o.r_i) choice->r_i = *o.r_i;
    if (!o.p_i.empty()) choice->p_i = UnitVector::normalize(Vec3(o.p_i[0], o.p_i[1], o.p_i[2]));
  }

  const RecognitionResult r = recognize(t, choice, o.eps_rec);
  if (r.verdict) {
    const std::string header =
        fmt::format("slvd recognize {}\nverdict true\nmax residual {:.3e} rad over {} vertices\neps-rec {}", o.input,
                    r.max_residual, r.examined, o.eps_rec);
    write_output(o.out, serialize_gen(*r.generators, header), out);
    if (!o.out.empty()) out << fmt::format("verdict true\nmax residual {:.3e} rad\n", r.max_residual);
    return 0;
  }
  out << "verdict false\n";
  if (r.witness) {
    out << fmt::format("witness vertex {} residual {:.3e} rad{}\n", r.witness->vertex, r.witness->residual,
                       r.isolated ? " (isolated)" : "");
  }
  return 1;
}

int cmd_perturb(const Options& o, std::ostream& out, std::ostream& err) {
  if (!(o.magnitude > 0)) {
    err << fmt::format("perturb: --magnitude must be positive, got {}\n", o.magnitude);
    return 2;
  }
  const Tessellation t = parse_tes(read_file(o.input));
  std::mt19937_64 rng(o.rng_seed);
  const Perturbation p = perturb_vertex(t, o.magnitude, rng);
  write_output(o.out,
               serialize_tes(p.tessellation, fmt::format("slvd perturb {} magnitude={} rng-seed={} vertex={}", o.input,
                                                         o.magnitude, o.rng_seed, p.vertex)),
               out);
  err << fmt::format("moved vertex {} by {} rad\n", p.vertex, o.magnitude);
  return 0;
}

int cmd_render(const Options& o, std::ostream& out, std::ostream&) {
  const Tessellation t = parse_tes(read_file(o.input));
  std::optional<GeneratorSet> g;
  if (!o.gen_input.empty()) g = parse_gen(read_file(o.gen_input));
  write_output(o.out, render_svg(t, g ? &*g : nullptr), out);
  return 0;
}

int cmd_bench(const Options& o, std::ostream& out, std::ostream& err) {
  for (std::size_t n : o.sizes) {
    if (n < 4) {
      err << fmt::format("bench: size {} is below 4\n", n);
      return 2;
    }
  }
  if (o.trials < 1) {
    err << "bench: --trials must be at least 1\n";
    return 2;
  }
  std::string csv = "n,construct_ms,propagate_ms,verify_ms\n";
  for (std::size_t n : o.sizes) {
    const BenchRow row = bench_size(n, o.trials, o.rng_seed);
    csv += fmt::format("{},{:.4f},{:.4f},{:.4f}\n", row.n, row.construct_ms, row.propagate_ms, row.verify_ms);
  }
  write_output(o.out, csv, out);
  err << fmt::format("rng-seed {} trials {}\n", o.rng_seed, o.trials);
  return 0;
}

int cmd_oracle_check(const Options& o, std::ostream& out, std::ostream&) {
  const GeneratorSet g = parse_gen(read_file(o.input));
  const OracleReport r = oracle_check(g, o.samples, o.rng_seed);
  write_output(o.out,
               fmt::format("samples {}\nexcluded {}\nmismatches {}\nrng-seed {}\n", r.samples, r.excluded,
                           r.mismatches, o.rng_seed),
               out);
  return r.mismatches == 0 ? 0 : 1;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spherical Laguerre Voronoi diagrams: construction, recognition, rendering", "slvd"};
  app.require_subcommand(1);
  Options o;

  auto* generate = app.add_subcommand("generate", "write n random generator circles (GEN)");
  generate->add_option("n", o.n, "number of circles")->required();
  generate->add_option("--rng-seed", o.rng_seed);
  generate->add_option("--out", o.out);

  auto* construct = app.add_subcommand("construct", "build the diagram of a GEN file (TES)");
  construct->add_option("gen", o.input)->required();
  construct->add_option("--out", o.out);
  construct->add_option("--off", o.off, "also write the polyhedron as OFF");

  auto* recog = app.add_subcommand("recognize", "decide whether a TES file is a Laguerre diagram");
  recog->add_option("tes", o.input)->required();
  recog->add_option("--eps-rec", o.eps_rec, "radial residual tolerance (rad)")->check(CLI::PositiveNumber);
  recog->add_option("--seed-vertex", o.seed_vertex);
  recog->add_option("--face-order", o.face_order)->check(CLI::Range(0, 5));
  recog->add_option("--qj-param", o.qj_param)->check(CLI::Range(0.0, 1.0));
  recog->add_option("--p-i", o.p_i, "seed circle center x y z")->expected(3);
  recog->add_option("--r-i", o.r_i, "seed circle radius (rad)");
  recog->add_option("--out", o.out, "recovered generators (GEN)");

  auto* perturb = app.add_subcommand("perturb", "move one random vertex tangentially");
  perturb->add_option("tes", o.input)->required();
  perturb->add_option("--magnitude", o.magnitude, "displacement (rad)")->required();
  perturb->add_option("--rng-seed", o.rng_seed);
  perturb->add_option("--out", o.out);

  auto* render = app.add_subcommand("render", "draw front and rear hemispheres as SVG");
  render->add_option("tes", o.input)->required();
  render->add_option("--gen", o.gen_input, "generator circles to overlay");
  render->add_option("--out", o.out);

  auto* bench = app.add_subcommand("bench", "time construction, propagation and verification (CSV)");
  bench->add_option("--sizes", o.sizes)->delimiter(',');
  bench->add_option("--trials", o.trials);
  bench->add_option("--rng-seed", o.rng_seed);
  bench->add_option("--out", o.out);

  auto* oracle = app.add_subcommand("oracle-check", "compare face membership with brute force");
  oracle->add_option("gen", o.input)->required();
  oracle->add_option("--samples", o.samples);
  oracle->add_option("--rng-seed", o.rng_seed);
  oracle->add_option("--out", o.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << e.what() << '\n' << "run 'slvd --help' for usage\n";
    return 2;
  }

  try {
    if (*generate) return cmd_generate(o, out, err);
    if (*construct) return cmd_construct(o, out, err);
    if (*recog) return cmd_recognize(o, out, err);
    if (*perturb) return cmd_perturb(o, out, err);
    if (*render) return cmd_render(o, out, err);
    if (*bench) return cmd_bench(o, out, err);
    if (*oracle) return cmd_oracle_check(o, out, err);
  } catch (const Error& e) {
    err << fmt::format("error ({}): {}\n", to_string(e.code()), e.what());
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

}  // namespace slvd::cli
