#include <doctest.h>

#include "support.hpp"

#include "cli.hpp"
#include "srskit/dataset.hpp"
#include "srskit/losses.hpp"

#include <json.hpp>

#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "srskit");
  std::ostringstream out, err;
  const int code = srskit::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

json error_line(const Outcome& o) {
  REQUIRE(o.err.find('\n') == o.err.size() - 1);
  return json::parse(o.err);
}

}  // namespace

TEST_CASE("help output matches the snapshot") {
  const auto o = run({"--help-all"});
  CHECK(o.code == 0);
  const fs::path golden = fs::path(SRSKIT_GOLDEN_DIR) / "help.txt";
  if (!fs::exists(golden) || std::getenv("SRSKIT_UPDATE_GOLDEN")) {
    std::ofstream(golden) << o.out;
    MESSAGE("pinned " << golden);
  } else {
    CHECK(o.out == test::slurp(golden));
  }
  for (const char* flag : {"--count", "--seed", "--grid", "--zeta", "--pad-scale", "--atoms", "--restarts", "--ga",
                           "--budget-s", "--baseline", "--csv", "--mode", "--k", "--threads"}) {
    CHECK(o.out.find(flag) != std::string::npos);
  }
  CHECK(run({"gen", "--help"}).code == 0);
}

TEST_CASE("usage errors") {
  const auto none = run({});
  CHECK(none.code == srskit::cli::kUsageError);
  CHECK(error_line(none)["error"] == "usage");
  CHECK(run({"gen", "--count", "3"}).code == srskit::cli::kUsageError);
  CHECK(run({"gen", "--count", "x", "--out", "y"}).code == srskit::cli::kUsageError);
  CHECK(run({"aggregate", "--in", "d", "--mode", "median"}).code == srskit::cli::kUsageError);
  CHECK(run({"srs", "--in", "d", "--out", "o", "--grid", "10,20"}).code != 0);
}

TEST_CASE("data errors") {
  const auto missing = run({"eval", "--targets", "/nonexistent/a", "--candidates", "/nonexistent/b", "--report",
                            (test::scratch_dir("cli_r") / "r.json").string()});
  CHECK(missing.code == srskit::cli::kDataError);
  CHECK(error_line(missing)["error"] == "data");
}

TEST_CASE("gen is deterministic") {
  const auto a = test::scratch_dir("cli_gen_a");
  const auto b = test::scratch_dir("cli_gen_b");
  REQUIRE(run({"gen", "--count", "10", "--seed", "7", "--out", a.string()}).code == 0);
  REQUIRE(run({"--threads", "1", "gen", "--count", "10", "--seed", "7", "--out", b.string()}).code == 0);
  for (const char* f : {"manifest.json", "payload.f32", "provenance.jsonl"}) {
    CHECK(test::slurp(a / f) == test::slurp(b / f));
  }
  CHECK(srskit::DatasetReader(a).size() == 10);
}

TEST_CASE("srs, eval, aggregate and export round trip") {
  const auto d = test::scratch_dir("cli_pipe_d");
  const auto s = test::scratch_dir("cli_pipe_s");
  const auto out = test::scratch_dir("cli_pipe_out");
  REQUIRE(run({"gen", "--count", "6", "--seed", "3", "--out", d.string()}).code == 0);
  REQUIRE(run({"srs", "--in", d.string(), "--out", s.string()}).code == 0);

  // Spectra recomputed from the stored float32 signals match the originals.
  srskit::DatasetReader rd(d), rs(s);
  for (srskit::Index i = 0; i < 6; ++i) {
    const auto a = rd.read(i).spectrum, b = rs.read(i).spectrum;
    CHECK((a.values() - b.values()).cwiseAbs().maxCoeff() <= 1e-5 * a.max());
  }

  const auto report = out / "report.json";
  const auto e = run({"eval", "--targets", d.string(), "--candidates", s.string(), "--report", report.string(),
                      "--csv", (out / "csv").string()});
  REQUIRE(e.code == 0);
  const auto j = json::parse(test::slurp(report));
  CHECK(j["db_within_1"] == 1.0);
  CHECK(j["summary"]["max"] == 0.0);
  for (const char* f : {"db_histogram.csv", "db_ecdf.csv", "rmsle_ecdf.csv", "per_sample.csv"}) {
    CHECK(fs::exists(out / "csv" / f));
  }

  const auto agg = out / "agg.json";
  REQUIRE(run({"aggregate", "--in", d.string(), "--mode", "upper-tol", "--k", "1.5", "--out", agg.string()}).code == 0);
  const auto a = json::parse(test::slurp(agg));
  CHECK(a["values"].size() == 100);
  CHECK(a["ensemble_size"] == 6);

  REQUIRE(run({"export-csv", "--in", d.string(), "--out", (out / "x").string(), "--index", "2", "--signals"}).code == 0);
  CHECK(fs::exists(out / "x" / "spectrum_2.csv"));
  CHECK(fs::exists(out / "x" / "signal_2.csv"));
}

TEST_CASE("losses-eval matches the library") {
  const auto d = test::scratch_dir("cli_loss_d");
  REQUIRE(run({"gen", "--count", "2", "--seed", "11", "--out", d.string()}).code == 0);
  const auto o = run({"losses-eval", "--target", d.string(), "--pred", d.string(), "--pred-index", "1", "--grid",
                      "10,4096,100"});
  REQUIRE(o.code == 0);
  const auto j = json::parse(o.out);
  srskit::DatasetReader r(d);
  const auto t = r.read(0).signal, p = r.read(1).signal;
  const auto parts = srskit::evaluate_losses(t, p, srskit::log_frequency_grid(10, 4096, 100), std::nullopt, {});
  CHECK(j["parts"]["shape"].get<double>() == parts.shape);
  CHECK(j["parts"]["ts"].get<double>() == parts.ts);
  CHECK(j["parts"]["psd"].get<double>() == parts.psd);
  CHECK(j["parts"]["srs"].get<double>() == parts.srs);
  CHECK(j["parts"]["kl"].get<double>() == 0.0);
  CHECK(j["total"].get<double>() == srskit::loss_total(parts, {}));
}

TEST_CASE("sds-fit writes models and candidates") {
  const auto d = test::scratch_dir("cli_fit_d");
  const auto out = test::scratch_dir("cli_fit_out");
  REQUIRE(run({"gen", "--count", "2", "--seed", "1", "--out", d.string()}).code == 0);
  const auto args = std::vector<std::string>{"sds-fit", "--target", d.string(), "--atoms", "3", "--restarts", "2",
                                             "--iters", "30", "--out"};
  auto first = args, second = args;
  first.push_back((out / "a.json").string());
  first.push_back("--candidates");
  first.push_back((out / "cand").string());
  second.push_back((out / "b.json").string());
  REQUIRE(run(first).code == 0);
  REQUIRE(run(second).code == 0);
  CHECK(test::slurp(out / "a.json") == test::slurp(out / "b.json"));
  const auto j = json::parse(test::slurp(out / "a.json"));
  CHECK(j["fits"].size() == 2);
  CHECK(srskit::DatasetReader(out / "cand").size() == 2);

  auto late = args;
  late.push_back((out / "c.json").string());
  late.push_back("--budget-s");
  late.push_back("1e-9");
  const auto o = run(late);
  CHECK(o.code == srskit::cli::kBudgetExhausted);
  CHECK(error_line(o)["error"] == "budget");
}
