#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "nmext/cli.hpp"

using nmext::cli::cli_run;

namespace {

struct CliOut {
    int code;
    std::string text;
};

CliOut run(std::vector<std::string> args) {
    std::ostringstream os;
    int code = cli_run(args, os);
    return {code, os.str()};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::size_t count_lines(const std::string& s, char first) {
    std::istringstream is(s);
    std::string line;
    std::size_t n = 0;
    while (std::getline(is, line))
        if (!line.empty() && line[0] == first) ++n;
    return n;
}

} // namespace

TEST_CASE("nmext-eval: worked example and failure modes") {
    CliOut ok = run({"nmext-eval", "--p", "3", "--n", "4", "--x", "1,2,0,1", "--y",
                     "1,1"});
    CHECK(ok.code == 0);
    CHECK(ok.text == "2\n");

    CHECK(run({"nmext-eval", "--p", "4", "--n", "4", "--x", "1,2,0,1", "--y", "1,1"})
              .code == 64); // composite modulus
    CHECK(run({"nmext-eval", "--p", "3", "--n", "4", "--x", "1,2,0", "--y", "1,1"})
              .code == 64); // wrong source length
    CHECK(run({"nmext-eval", "--p", "3"}).code == 64); // missing required flags
    CHECK(run({"nmext-eval", "--p", "3", "--n", "4", "--x", "1,2,0,1", "--y", "1,1",
               "--bogus"})
              .code == 64);
    CHECK(run({"no-such-command"}).code == 64);
    CHECK(run({}).code == 64);

    CliOut help = run({"--help"});
    CHECK(help.code == 0);
    CHECK(help.text.find("nmext-eval") != std::string::npos);
    CHECK(help.text.find("report") != std::string::npos);
}

TEST_CASE("nm-scan: table shape, oracle line, resource refusal") {
    CliOut ok = run({"nm-scan", "--p", "3", "--n", "2", "--source", "uniform"});
    CHECK(ok.code == 0);
    CHECK(ok.text.find("f_index,distance,distance_double") != std::string::npos);
    CHECK(count_lines(ok.text, '#') >= 2);
    std::size_t data_rows = 0;
    std::istringstream is(ok.text);
    std::string line;
    while (std::getline(is, line))
        if (!line.empty() && line[0] >= '0' && line[0] <= '9') ++data_rows;
    CHECK(data_rows == 8);
    CHECK(ok.text.find("# oracle=match") != std::string::npos);
    CHECK(ok.text.find("2/9") != std::string::npos);

    CHECK(run({"nm-scan", "--p", "5", "--n", "4", "--source", "uniform"}).code == 3);
    CHECK(run({"nm-scan", "--p", "3", "--n", "2", "--source", "constant", "--x0",
               "99"})
              .code == 64);
}

TEST_CASE("sweeps: reruns are byte-identical, seed env wins") {
    std::vector<std::string> args{"xor-sweep", "--cases", "2", "--seed", "5"};
    CliOut a = run(args);
    CliOut b = run(args);
    CHECK(a.code == 0);
    CHECK(a.text == b.text);
    CHECK(a.text.find("case_id,variant,lhs,rhs,margin") != std::string::npos);
    CHECK(a.text.find("violations=0") != std::string::npos);

    CliOut direct = run({"xor-sweep", "--cases", "2", "--seed", "42"});
    setenv("NMEXT_SEED", "42", 1);
    CliOut via_env = run({"xor-sweep", "--cases", "2", "--seed", "5"});
    unsetenv("NMEXT_SEED");
    CHECK(via_env.text == direct.text);

    setenv("NMEXT_SEED", "not-a-number", 1);
    CHECK(run({"xor-sweep", "--cases", "2"}).code == 64);
    unsetenv("NMEXT_SEED");

    CliOut sw = run({"sandwich-sweep", "--cases", "2", "--seed", "5"});
    CHECK(sw.code == 0);
    CHECK(sw.text.find("violations=0") != std::string::npos);
}

TEST_CASE("--out mirrors stdout exactly") {
    const char* path = "/tmp/nmext_test_out.csv";
    CliOut a = run({"nm-scan", "--p", "3", "--n", "2", "--source", "half", "--out",
                    path});
    CHECK(a.code == 0);
    CHECK(slurp(path) == a.text);
    std::remove(path);
}

TEST_CASE("config files fill in flags; the command line wins") {
    const char* path = "/tmp/nmext_test.cfg";
    {
        std::ofstream cfg(path);
        cfg << "# scan setup\n"
            << "p=3\n"
            << "n=2\n"
            << "source=uniform\n"
            << "seed=5\n";
    }
    CliOut via_cfg = run({"nm-scan", "--config", path});
    CliOut via_flags =
        run({"nm-scan", "--p", "3", "--n", "2", "--source", "uniform", "--seed", "5"});
    CHECK(via_cfg.code == 0);
    CHECK(via_cfg.text == via_flags.text);

    // explicit flag overrides the file
    CliOut override_p =
        run({"nm-scan", "--config", path, "--source", "constant", "--x0", "4"});
    CHECK(override_p.text.find("2/3") != std::string::npos);
    std::remove(path);

    CHECK(run({"nm-scan", "--config", "/tmp/definitely-missing.cfg", "--p", "3",
               "--n", "2"})
              .code == 64);
}

TEST_CASE("mac-attack: exact advantage JSON") {
    CliOut a = run({"mac-attack", "--t", "2", "--L", "1"});
    CHECK(a.code == 0);
    CHECK(a.text.find("\"advantage\": \"1/4\"") != std::string::npos);
    CHECK(a.text.find("\"tight\": true") != std::string::npos);
    CliOut b = run({"mac-attack", "--t", "3", "--L", "1"});
    CHECK(b.text.find("\"advantage\": \"1/8\"") != std::string::npos);
    CHECK(run({"mac-attack", "--t", "9", "--L", "1"}).code == 3); // enumeration cap
}

TEST_CASE("protocol runs: reports, transcripts, determinism") {
    std::vector<std::string> dw{"dw-run", "--p", "3", "--n", "2", "--d2", "4",
                                "--t",    "2", "--m", "2"};
    CliOut a = run(dw);
    CHECK(a.code == 0);
    CHECK(a.text.find("\"schema\": 1") != std::string::npos);
    CHECK(a.text.find("259/864") != std::string::npos);
    CHECK(a.text == run(dw).text);

    CliOut single = run({"dw-run", "--p", "3", "--n", "2", "--d2", "4", "--t", "2",
                         "--m", "2", "--single", "--seed", "11"});
    CHECK(single.code == 0);
    CHECK(single.text.find("\"ya\":[") != std::string::npos);
    CHECK(single.text.find("\"key_confirmed\":true") != std::string::npos);

    CliOut orr = run({"one-round-run", "--n", "4", "--v", "1", "--m", "1"});
    CHECK(orr.code == 0);
    CHECK(orr.text.find("\"exact\": \"1\"") != std::string::npos);

    CliOut osingle =
        run({"one-round-run", "--n", "4", "--v", "1", "--m", "1", "--single"});
    CHECK(osingle.text.find("\"ya\":null") != std::string::npos);

    // invalid shapes come back as usage errors
    CHECK(run({"dw-run", "--p", "3", "--n", "3"}).code == 64);
    CHECK(run({"one-round-run", "--n", "4", "--v", "4", "--m", "1"}).code == 64);
    // exhaustive budget blowups surface as resource errors
    CHECK(run({"dw-run", "--p", "5", "--n", "4", "--d2", "12", "--t", "2", "--m",
               "2"})
              .code == 3);
}

TEST_CASE("game-scan: exhaustive census JSON") {
    CliOut g = run({"game-scan", "--p", "3", "--n", "2", "--seed", "3"});
    CHECK(g.code == 0);
    CHECK(g.text.find("\"functions\": 19683") != std::string::npos);
    CHECK(g.text.find("\"violations\": 0") != std::string::npos);
    CHECK(g.text.find("\"max_win\": \"7/9\"") != std::string::npos);
    CHECK(run({"game-scan", "--p", "5", "--n", "2", "--seed", "3"}).code == 3);
}

TEST_CASE("report: one-shot battery is green and reproducible") {
    CliOut a = run({"report", "--seed", "7"});
    CHECK(a.code == 0);
    CHECK(a.text.find("\"violations\": 0") != std::string::npos);
    CHECK(a.text == run({"report", "--seed", "7"}).text);
}
