#include "doctest.h"

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(DPHT_CLI) + " " + args + " 2>/dev/null";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe);
    char buf[4096];
    std::size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string write_file(const std::string& name, const std::string& text) {
    std::ofstream(name) << text;
    return name;
}

std::string three_groups() {
    std::ostringstream s;
    s << "group,value\n";
    for (int i = 0; i < 30; ++i) s << "g" << i % 3 << ',' << std::sin(i * 1.7) + (i % 3) << '\n';
    return write_file("cli_groups.csv", s.str());
}

}  // namespace

TEST_CASE("test command emits one deterministic json object") {
    const auto file = three_groups();
    const std::string args = "test --test kwabs --epsilon 1 --seed 42 --reps 5000 --input " + file;
    const auto a = run(args), b = run(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    const auto j = nlohmann::json::parse(a.out);
    const char* keys[] = {"test", "statistic", "p_value", "n", "g", "epsilon", "delta", "split", "reps", "seed", "reference"};
    for (const char* k : keys) CHECK(j.contains(k));
    CHECK(j["test"] == "kwabs");
    CHECK(j["n"] == 30);
    CHECK(j["g"] == 3);
    CHECK(j["split"].is_null());
    CHECK(j["reference"] == "full-sim");

    const auto declared = nlohmann::json::parse(run(args + " --groups 5").out);
    CHECK(declared["g"] == 5);
}

TEST_CASE("usage errors exit with 2") {
    const auto file = three_groups();
    CHECK(run("").code == 2);
    CHECK(run("test --epsilon 1 --input " + file).code == 2);
    CHECK(run("test --test kw --epsilon 1").code == 2);
    CHECK(run("test --test nope --epsilon 1 --input " + file).code == 2);
    CHECK(run("test --test kw --epsilon 0 --input " + file).code == 2);
    const auto two = write_file("cli_two.csv", "group,value\na,1\na,2\nb,3\nb,5\nb,4\n");
    const auto mw = run("test --test mw --epsilon 1 --input " + two);
    CHECK(mw.code == 2);
    CHECK(mw.out.empty());
    CHECK(run("test --test mw --epsilon 1 --reps 2000 --input " + two + " --known-equal-groups").code == 0);
    CHECK(run("test --test mw --epsilon 1 --reps 2000 --delta 1e-6 --input " + two).code == 0);
    CHECK(run("test --test kw --epsilon 1 --split 0.5 --input " + file).code == 2);
}

TEST_CASE("input errors exit with 4 and degenerate data with 3") {
    CHECK(run("test --test kw --epsilon 1 --input /no/such/file.csv").code == 4);
    const auto bad = write_file("cli_bad.csv", "group,value\na,1\nb,x\n");
    CHECK(run("test --test kw --epsilon 1 --input " + bad).code == 4);
    const auto wide = write_file("cli_wide.csv", "value\n1.5\n0.2\n");
    CHECK(run("test --test ttest --epsilon 1 --input " + wide).code == 4);
    const auto lonely = write_file("cli_lonely.csv", "group,value\na,1\na,2\na,3\n");
    CHECK(run("test --test mw --epsilon 1 --delta 1e-6 --groups 2 --input " + lonely).code == 3);
}

TEST_CASE("separated paired data rejects") {
    std::ostringstream s;
    s << "u,v\n";
    for (int i = 0; i < 200; ++i) s << std::sin(i) << ',' << std::sin(i) + 2.0 + 0.5 * std::cos(i * 3.1) << '\n';
    const auto file = write_file("cli_paired.csv", s.str());
    const auto r = run("test --test wilcoxon --epsilon 1e9 --reps 10000 --input " + file);
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["p_value"].get<double>() < 0.01);
    CHECK(j["reject"] == true);
}

TEST_CASE("critval, power and qq print headered csv") {
    const auto c = run("critval --test wilcoxon --epsilon 1 --n 10 --alphas 0.05,0.01 --reps 200000");
    REQUIRE(c.code == 0);
    std::istringstream lines(c.out);
    std::string header, row;
    std::getline(lines, header);
    CHECK(header == "n,alpha,critical_value");
    std::getline(lines, row);
    CHECK(row.rfind("10,0.05,", 0) == 0);
    CHECK(std::fabs(std::stod(row.substr(8)) - 70) < 3);
    CHECK(run("critval --test kw --epsilon 1 --n 30 --normalized").code == 2);

    const auto p = run("power --test kw --epsilon 1 --n 60 --effect 0 --trials 300 --reps 2000");
    REQUIRE(p.code == 0);
    std::istringstream plines(p.out);
    std::getline(plines, header);
    CHECK(header == "n,epsilon,power,se");
    std::getline(plines, row);
    const double power = std::stod(row.substr(row.find(',', 3) + 1));
    CHECK(power <= 0.05 + 3 * std::sqrt(0.05 * 0.95 / 300));

    const auto q = run("qq --test wilcoxon --epsilon 1 --n 50 --trials 100 --reps 2000");
    REQUIRE(q.code == 0);
    CHECK(q.out.rfind("theoretical,empirical\n", 0) == 0);
    CHECK(std::count(q.out.begin(), q.out.end(), '\n') == 101);
    CHECK(run("qq --test wilcoxon --epsilon 1 --n 50,60 --trials 100").code == 2);
}
