#include "structura/cli.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <sstream>

using namespace structura;

namespace {

struct Run {
  int exit;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

std::string data(const char* name) {
  return std::string(STRUCTURA_DATA_DIR) + "/" + name;
}

}  // namespace

TEST_CASE("derived cohomology of the constant sheaf on the circle model", "[cli]") {
  Run r = run({"cohomology", "--mode", "derived", data("pseudocircle.json"),
               data("constZ.json"), "--max-degree", "2"});
  CHECK(r.exit == 0);
  CHECK(r.out == "H^0 = Z\nH^1 = Z\nH^2 = 0\n");
  CHECK(r.err.empty());
}

TEST_CASE("json reports reparse and repeat byte for byte", "[cli]") {
  std::vector<std::string> args{"--output", "json", "cohomology",
                                "--mode", "derived", data("pseudocircle.json"),
                                data("constZ.json"), "--max-degree", "2"};
  Run a = run(args), b = run(args);
  CHECK(a.exit == 0);
  CHECK(a.out == b.out);
  io::Json j = io::Json::parse(a.out);
  CHECK(j["mode"] == "derived");
  CHECK(j["cohomology"][0]["rank"] == 1);
  CHECK(j["cohomology"][2]["rank"] == 0);
}

TEST_CASE("the sheaf check separates verdict and exit code", "[cli]") {
  Run bad = run({"check", data("notasheaf.json")});
  CHECK(bad.exit == 1);
  CHECK(bad.out.find("sheaf: no") != std::string::npos);
  CHECK(bad.out.find("gluing") != std::string::npos);

  Run good = run({"check", data("circleZ.json")});
  CHECK(good.exit == 0);
  CHECK(good.out.find("sheaf: yes") != std::string::npos);

  Run structured = run({"check", data("structured_pair.json")});
  CHECK(structured.exit == 0);
  CHECK(structured.out.find("members: 2") != std::string::npos);

  Run json = run({"--output", "json", "check", data("notasheaf.json")});
  CHECK(json.exit == 1);
  io::Json j = io::Json::parse(json.out);
  CHECK(j["sheaf"] == false);
  CHECK(j["failures"][0]["axiom"] == "gluing");
}

TEST_CASE("cech mode follows a cover chain file", "[cli]") {
  Run r = run({"cohomology", "--mode", "cech", data("circleZ.json"),
               "--covers", data("polecover.json"), "--max-degree", "1"});
  CHECK(r.exit == 0);
  CHECK(r.out == "H^0 = Z\nH^1 = Z\n");
}

TEST_CASE("structured mode assembles member tables", "[cli]") {
  Run total = run({"cohomology", "--mode", "structured",
                   data("structured_pair.json"), "--assembly", "total",
                   "--max-degree", "2"});
  CHECK(total.exit == 0);
  CHECK(total.out == "total: H^0 = Z, H^1 = Z/2, H^2 = 0\n");

  Run rows = run({"cohomology", "--mode", "structured",
                  data("structured_pair.json"), "--max-degree", "2"});
  CHECK(rows.exit == 0);
  CHECK(rows.out ==
        "member 1: H^0 = Z, H^1 = 0, H^2 = 0\n"
        "member 2: H^0 = Z/2, H^1 = 0, H^2 = 0\n");
}

TEST_CASE("hochschild covers single algebras and structured input", "[cli]") {
  Run a = run({"hochschild", data("dualnumbers_q.json"), "--max-degree", "2"});
  CHECK(a.exit == 0);
  CHECK(a.out ==
        "algebra: dim 2 over Q\nHH^0 = 2\nHH^1 = 1\nHH^2 = 1\n");

  Run s = run({"hochschild", data("structured_f2f2.json"),
               "--assembly", "total", "--max-degree", "2"});
  CHECK(s.exit == 0);
  CHECK(s.out.find("total: HH^0 = 1, HH^1 = 1, HH^2 = 0") != std::string::npos);
}

TEST_CASE("spec lists primes, stalks, and the local verdict", "[cli]") {
  Run r = run({"spec", data("zmod12.json")});
  CHECK(r.exit == 0);
  CHECK(r.out.find("(2)") != std::string::npos);
  CHECK(r.out.find("(3)") != std::string::npos);
  CHECK(r.out.find("Z/4") != std::string::npos);
  CHECK(r.out.find("Z/3") != std::string::npos);
  CHECK(r.out.find("locally ringed: yes") != std::string::npos);

  Run json = run({"--output", "json", "spec", data("zmod12.json")});
  io::Json j = io::Json::parse(json.out);
  CHECK(j["locally_ringed"] == true);
  CHECK(j["points"].size() == 2);
}

TEST_CASE("k0 reports the free group and the bundle class", "[cli]") {
  Run r = run({"k0", data("bundle_pseudocircle.json")});
  CHECK(r.exit == 0);
  CHECK(r.out ==
        "K0 = Z^2\n"
        "generators: {a,b,c,d}#1, {a,b,c,d}#2\n"
        "class: (1, 0)\n");
}

TEST_CASE("complete builds the group completion of a monoid file", "[cli]") {
  Run n = run({"complete", data("monoid_naturals.json")});
  CHECK(n.exit == 0);
  CHECK(n.out.find("group = Z\n") != std::string::npos);
  CHECK(n.out.find("classes: 13") != std::string::npos);

  Run e = run({"complete", data("monoid_idempotent.json")});
  CHECK(e.exit == 0);
  CHECK(e.out.find("group = 0\n") != std::string::npos);
  CHECK(e.out.find("classes: 1") != std::string::npos);
}

TEST_CASE("input mistakes exit with code two", "[cli]") {
  Run unknown = run({"frobnicate"});
  CHECK(unknown.exit == 2);
  CHECK(unknown.err.find("UnknownCommand") != std::string::npos);

  Run missing = run({"check", data("does_not_exist.json")});
  CHECK(missing.exit == 2);
  CHECK(missing.err.find("cannot open file") != std::string::npos);

  Run nocovers = run({"cohomology", "--mode", "cech", data("circleZ.json")});
  CHECK(nocovers.exit == 2);
  CHECK(nocovers.err.find("OptionConflict") != std::string::npos);

  Run badmode = run({"cohomology", "--mode", "wavelet", data("circleZ.json")});
  CHECK(badmode.exit == 2);
  CHECK(badmode.err.find("ParseError") != std::string::npos);

  Run twofiles = run({"check", data("circleZ.json"), data("notasheaf.json")});
  CHECK(twofiles.exit == 2);
  CHECK(twofiles.err.find("exactly one input file") != std::string::npos);

  Run strayassembly = run({"cohomology", "--mode", "derived",
                           data("circleZ.json"), "--assembly", "total"});
  CHECK(strayassembly.exit == 2);
  CHECK(strayassembly.err.find("OptionConflict") != std::string::npos);
}

TEST_CASE("mathematical rejections exit with code one", "[cli]") {
  Run r = run({"cohomology", "--mode", "derived", data("notasheaf.json")});
  CHECK(r.exit == 1);
  CHECK(r.err.find("NotASheaf") != std::string::npos);
  CHECK(r.err.find("gluing") != std::string::npos);
}

TEST_CASE("the element cap comes from the environment", "[cli]") {
  ::setenv("STRUCTURA_MAX_ELEMENTS", "4", 1);
  Run capped = run({"complete", data("monoid_naturals.json")});
  CHECK(capped.exit == 1);
  CHECK(capped.err.find("TooLarge") != std::string::npos);

  ::setenv("STRUCTURA_MAX_ELEMENTS", "banana", 1);
  Run junk = run({"complete", data("monoid_naturals.json")});
  CHECK(junk.exit == 2);
  CHECK(junk.err.find("positive integer") != std::string::npos);

  ::setenv("STRUCTURA_MAX_ELEMENTS", "0", 1);
  CHECK(run({"complete", data("monoid_naturals.json")}).exit == 2);

  ::unsetenv("STRUCTURA_MAX_ELEMENTS");
  CHECK(run({"complete", data("monoid_naturals.json")}).exit == 0);
}

TEST_CASE("help requests exit cleanly", "[cli]") {
  Run top = run({"--help"});
  CHECK(top.exit == 0);
  CHECK(top.out.find("Subcommands") != std::string::npos);

  Run sub = run({"cohomology", "--help"});
  CHECK(sub.exit == 0);
  CHECK(sub.out.find("--mode") != std::string::npos);
}
