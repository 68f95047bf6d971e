// semiforge: search, verify and classify finite semifields of small
// prime-power order via the standard-basis matrix characterization.
//
// Exit codes: 0 success, 1 verification mismatch, 2 usage/format error.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "semiforge/fixtures.hpp"

using namespace semiforge;

namespace {

int threads_flag = 0;

std::vector<StandardBasis> read_basis_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(0, "cannot open " + path);
  std::vector<StandardBasis> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    out.push_back(parse_basis_line(line, lineno));
  }
  if (out.empty()) throw FormatError(lineno, "no basis records in " + path);
  return out;
}

Mat read_matrix_stdin(int p, int n) {
  Mat m(p, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      long long v;
      if (!(std::cin >> v)) throw FormatError(r + 1, "expected " + std::to_string(n * n) + " matrix entries on stdin");
      if (v < 0 || v >= p) throw FormatError(r + 1, "entry out of range [0," + std::to_string(p) + ")");
      m.set(r, c, static_cast<uint8_t>(v));
    }
  return m;
}

int cmd_decode(code_t value, int pos, int p, int n) {
  Mat m = decode_matrix(value, pos, p, n);
  std::cout << m.to_string();
  return 0;
}

int cmd_encode(int pos, int p, int n) {
  Mat m = read_matrix_stdin(p, n);
  std::cout << encode_matrix(m, pos) << "\n";
  return 0;
}

int cmd_validate(const std::string& path) {
  auto bases = read_basis_file(path);
  int bad = 0;
  for (size_t i = 0; i < bases.size(); ++i) {
    auto v = validate_standard_basis(bases[i]);
    std::cout << "record " << (i + 1) << ": " << (v ? v->message() : "ok") << "\n";
    bad += v.has_value();
  }
  return bad ? 1 : 0;
}

int cmd_invariants(const std::string& path, bool skip_at, bool skip_census, bool skip_orbits) {
  auto bases = read_basis_file(path);
  for (size_t i = 0; i < bases.size(); ++i) {
    Semifield d = Semifield::from_basis(bases[i]);
    std::cout << "plane=" << (i + 1) << "\n";
    std::cout << "basis=" << format_basis_line(bases[i]) << "\n";
    std::cout << "zn=" << d.nuclei().to_string() << "\n";
    if (!skip_at) {
      Analyzer an(d, threads_flag);
      std::cout << "at=" << an.at_order() << "\n";
      if (!skip_census) {
        Census c = an.census();
        std::cout << "census=" << c.to_string() << "\n";
        std::cout << "sa_sum=" << c.sa_sum.to_string() << "\n";
      }
      if (!skip_orbits) {
        TriangleOrbits orb = an.triangle_orbits(an.autotopism_group());
        std::cout << "orbits_lx=" << TriangleOrbits::side_string(orb.lx) << "\n";
        std::cout << "orbits_linf=" << TriangleOrbits::side_string(orb.linf) << "\n";
        std::cout << "orbits_ly=" << TriangleOrbits::side_string(orb.ly) << "\n";
      }
    }
    std::cout << "\n";
  }
  return 0;
}

int cmd_isotopic(const std::string& path_a, const std::string& path_b) {
  Semifield a = Semifield::from_basis(read_basis_file(path_a).front());
  Semifield b = Semifield::from_basis(read_basis_file(path_b).front());
  bool iso = is_isotopic(a, b);
  std::cout << "isotopic=" << (iso ? "true" : "false") << "\n";
  return iso ? 0 : 1;
}

int cmd_search(int p, int n, int shards, int shard_index, const std::string& out_path,
               const std::string& checkpoint, bool resume, double budget) {
  if (shard_index >= 0) {
    // enumerate one shard, record format output
    auto plan = shard_plan(p, n, shards);
    if (shard_index >= static_cast<int>(plan.size()))
      throw CLI::ValidationError("--shard", "index exceeds plan size " + std::to_string(plan.size()));
    std::ofstream out;
    std::ostream* os = &std::cout;
    std::ios_base::openmode mode = resume ? std::ios::app : std::ios::trunc;
    if (!out_path.empty()) {
      out.open(out_path, mode);
      os = &out;
    }
    SearchControl control;
    detail::Checkpoint ck;
    if (resume && !checkpoint.empty()) {
      ck = detail::Checkpoint::load(checkpoint);
      auto it = ck.shards.find(shard_index);
      if (it != ck.shards.end()) {
        if (it->second.second) return 0;  // already done
        control.resume = true;
        control.resume_after_a3 = it->second.first;
      }
    }
    if (budget > 0) {
      control.use_deadline = true;
      control.deadline = std::chrono::steady_clock::now() +
                         std::chrono::microseconds(static_cast<long long>(budget * 1e6));
    }
    // buffer per A_3 subtree so an interrupted run never writes a partial one
    std::vector<std::string> pending;
    control.on_a3_done = [&](code_t code) {
      for (const std::string& line : pending) (*os) << line << "\n";
      os->flush();
      pending.clear();
      if (!checkpoint.empty()) {
        ck.shards[shard_index] = {code, false};
        ck.save(checkpoint);
      }
    };
    SearchStats stats;
    enumerate_standard_bases(plan[static_cast<size_t>(shard_index)], p, n,
                             [&](const StandardBasis& b) { pending.push_back(format_basis_line(b)); },
                             &stats, &control);
    if (!control.stopped && !checkpoint.empty()) {
      auto& entry = ck.shards[shard_index];
      entry.second = true;
      ck.save(checkpoint);
    }
    std::cerr << "shard " << shard_index << "/" << plan.size() << ": candidates="
              << stats.candidates << " emitted=" << stats.emitted
              << (control.stopped ? " (budget exhausted, resumable)" : "") << "\n";
    return control.stopped ? 1 : 0;
  }

  // full run with classification
  FullClassificationOptions opt;
  opt.p = p;
  opt.n = n;
  opt.shards = shards;
  opt.threads = threads_flag;
  opt.budget_seconds = budget;
  opt.checkpoint_path = checkpoint;
  opt.resume = resume;
  std::ofstream out;
  std::ostream* os = nullptr;
  if (!out_path.empty()) {
    if (resume) {
      std::ifstream existing(out_path);
      std::string line;
      int lineno = 0;
      while (std::getline(existing, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        opt.preload.push_back(parse_basis_line(line, lineno));
      }
    }
    out.open(out_path, resume ? std::ios::app : std::ios::trunc);
    os = &out;
  }
  if (os) opt.emit = [&](const StandardBasis& b) { (*os) << format_basis_line(b) << "\n"; };
  auto res = full_classification(opt);
  if (!res.complete) {
    std::cerr << "budget exhausted; partial result checkpointed, rerun with --resume\n";
    return 1;
  }
  std::cout << "bases=" << res.bases_found << "\n";
  std::cout << "s3_classes=" << res.s3_classes << "\n";
  std::cout << "isotopy_classes=" << res.isotopy_classes << "\n";
  std::cout << "isomorphism_classes=" << res.isomorphism_classes << "\n";
  for (const PlaneRecord& r : res.records) std::cout << "\n" << serialize_plane_record(r);
  return 0;
}

int cmd_verify_paper(bool full, bool skip_at, bool skip_census, bool skip_orbits,
                     bool skip_groups) {
  VerifyOptions opt;
  opt.full = full;
  opt.threads = threads_flag;
  opt.skip_at = skip_at;
  opt.skip_census = skip_census;
  opt.skip_orbits = skip_orbits;
  opt.skip_groups = skip_groups;
  auto results = verify_paper(opt, &std::cout);
  int fails = 0;
  for (const auto& r : results) fails += !r.pass;
  std::cout << (fails ? "FAIL" : "PASS") << " (" << (results.size() - static_cast<size_t>(fails))
            << "/" << results.size() << " checks)\n";
  return fails ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite semifield search and classification"};
  app.require_subcommand(1);
  app.add_option("--threads", threads_flag, "worker threads (default: SEMIFORGE_THREADS or core count)");

  unsigned long long decode_value = 0;
  int pos = 2, p = 3, n = 5;
  auto* dec = app.add_subcommand("decode", "decode a matrix code to a matrix");
  dec->add_option("value", decode_value, "matrix code")->required();
  dec->add_option("--pos", pos, "basis position (first column e_pos)");
  dec->add_option("--p", p, "field characteristic");
  dec->add_option("--n", n, "dimension");

  auto* enc = app.add_subcommand("encode", "encode a matrix (entries on stdin, row major)");
  enc->add_option("--pos", pos, "basis position");
  enc->add_option("--p", p, "field characteristic");
  enc->add_option("--n", n, "dimension");

  std::string file_a, file_b;
  auto* val = app.add_subcommand("validate", "validate standard bases from a record file");
  val->add_option("file", file_a, "record file")->required();

  bool skip_at = false, skip_census = false, skip_orbits = false, skip_groups = false;
  auto* inv = app.add_subcommand("invariants", "compute plane invariants for a record file");
  inv->add_option("file", file_a, "record file")->required();
  inv->add_flag("--skip-at", skip_at, "skip |At| and everything that needs it");
  inv->add_flag("--skip-census", skip_census, "skip the principal isotope census");
  inv->add_flag("--skip-orbits", skip_orbits, "skip triangle orbits");

  auto* iso = app.add_subcommand("isotopic", "test two record files for isotopy");
  iso->add_option("file_a", file_a, "first record file")->required();
  iso->add_option("file_b", file_b, "second record file")->required();

  int shards = 1, shard_index = -1;
  double budget = 0;
  std::string out_path, checkpoint;
  bool resume = false;
  auto* sea = app.add_subcommand("search", "enumerate standard bases and classify");
  sea->add_option("--p", p, "field characteristic")->required();
  sea->add_option("--n", n, "dimension")->required();
  sea->add_option("--shards", shards, "minimum shard count for the work plan");
  sea->add_option("--shard", shard_index, "run only this shard (enumeration only)");
  sea->add_option("--out", out_path, "result file (one basis per line)");
  sea->add_option("--checkpoint", checkpoint, "checkpoint file");
  sea->add_flag("--resume", resume, "resume from the checkpoint file");
  sea->add_option("--budget", budget, "wall-clock budget in seconds (0 = unlimited)");

  bool full = false;
  auto* ver = app.add_subcommand("verify-paper", "check the embedded order-243 fixtures");
  ver->add_flag("--full", full, "also expand the S3 orbits (slow)");
  ver->add_flag("--skip-at", skip_at, "skip |At| and everything that needs it");
  ver->add_flag("--skip-census", skip_census, "skip the census stage");
  ver->add_flag("--skip-orbits", skip_orbits, "skip triangle orbits");
  ver->add_flag("--skip-groups", skip_groups, "skip group structure checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    if (dec->parsed()) return cmd_decode(decode_value, pos, p, n);
    if (enc->parsed()) return cmd_encode(pos, p, n);
    if (val->parsed()) return cmd_validate(file_a);
    if (inv->parsed()) return cmd_invariants(file_a, skip_at, skip_census, skip_orbits);
    if (iso->parsed()) return cmd_isotopic(file_a, file_b);
    if (sea->parsed()) return cmd_search(p, n, shards, shard_index, out_path, checkpoint, resume, budget);
    if (ver->parsed()) return cmd_verify_paper(full, skip_at, skip_census, skip_orbits, skip_groups);
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
