#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "golden_files.hpp"
#include "json_numbers.hpp"
#include "parity_cases.hpp"
#include "xbn/cli.hpp"

using namespace xbn;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("query prints the posterior table") {
        const auto r = run({"query", "--net", "builtin:asia", "--target", "Smoker", "--evidence", "TbOrCancer=yes"});
        CHECK(r.code == 0);
        CHECK(r.out.find("Smoker    yes    0.8435") != std::string::npos);
        CHECK(r.err.empty());
    }

    TEST_CASE("JSON output matches the golden files") {
        for (const auto& c : testing::parity_cases()) {
            CAPTURE(c.name);
            auto args = c.args;
            args.insert(args.end(), {"--format", "json"});
            const auto r = run(args);
            REQUIRE(r.code == 0);
            CHECK(r.out == testing::golden(c.name, r.out));
            CHECK(run(args).out == r.out);  // byte-identical on repeat
        }
    }

    TEST_CASE("table and JSON carry the same numbers") {
        for (const auto& c : testing::parity_cases()) {
            CAPTURE(c.name);
            auto json_args = c.args;
            json_args.insert(json_args.end(), {"--format", "json"});
            const json doc = json::parse(run(json_args).out);
            std::set<std::string> allowed;
            testing::collect_display_numbers(doc, allowed);
            for (const auto& n : testing::displayed_numbers(run(c.args).out)) {
                CAPTURE(n);
                CHECK(allowed.count(n) == 1);
            }
        }
    }

    TEST_CASE("exit codes") {
        const auto unknown = run({"query", "--target", "Nope"});
        CHECK(unknown.code == cli::kExitUsage);
        CHECK(unknown.err.find("unknown variable 'Nope'") != std::string::npos);
        CHECK(unknown.out.empty());

        CHECK(run({"query", "--net", "/nonexistent.bif", "--target", "A"}).code == cli::kExitUsage);
        CHECK(run({"frobnicate"}).code == cli::kExitUsage);
        CHECK(run({}).code == cli::kExitUsage);
        CHECK(run({"mpe", "--format", "xml"}).code == cli::kExitUsage);
        CHECK(run({"sdp", "--hypothesis", "Smoker=yes"}).code == cli::kExitUsage);
        CHECK(run({"--help"}).code == cli::kExitOk);

        const auto impossible = run({"mpe", "-e", "LungCancer=yes,TbOrCancer=no"});
        CHECK(impossible.code == cli::kExitComputation);
        CHECK(impossible.err.find("impossible evidence") != std::string::npos);
        CHECK(run({"gbf", "--explanation", "LungCancer=yes,TbOrCancer=no", "-e", "Dyspnoea=yes"}).code ==
              cli::kExitComputation);
    }

    TEST_CASE("validate reports parse diagnostics") {
        const std::string path = "xbn_cli_test_bad.bif";
        std::ofstream(path) << "network N {\n}\nvariable A {\n  type discrete [ 2 ] { yes no };\n}\n";
        const auto bad = run({"validate", "--net", path});
        CHECK(bad.code == cli::kExitComputation);
        CHECK(bad.err.find("4:") != std::string::npos);

        std::ofstream(path) << "network N {\n}\nvariable A {\n  type discrete [ 2 ] { yes, no };\n}\n"
                               "probability ( A ) {\n  table 0.5, 0.5;\n}\n";
        const auto ok = run({"validate", "--net", path, "--format", "json"});
        CHECK(ok.code == 0);
        CHECK(json::parse(ok.out)["valid"] == true);
        std::remove(path.c_str());

        CHECK(run({"validate", "--net", XBN_SOURCE_DIR "/assets/asia.bif"}).code == 0);
    }
}
