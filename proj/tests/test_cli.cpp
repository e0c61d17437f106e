#include "mdissim/mdissim.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

using namespace mdissim;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int status;
    std::string out;
};

// Runs the CLI through the shell; stderr is discarded.
Outcome cli(const std::string& args) {
    std::string command = std::string(MDISSIM_CLI) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(command.c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed");
    std::string out;
    char buffer[4096];
    std::size_t got;
    while ((got = fread(buffer, 1, sizeof buffer, pipe)) > 0) out.append(buffer, got);
    int raw = pclose(pipe);
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

std::string data(const std::string& name) { return std::string(MDISSIM_TEST_DATA) + "/" + name; }

class Scratch {
public:
    Scratch() : dir_(fs::temp_directory_path() / ("mdissim_cli_" + std::to_string(::getpid()))) {
        fs::create_directories(dir_);
    }
    ~Scratch() { fs::remove_all(dir_); }

    std::string write(const std::string& name, const std::string& text) const {
        fs::path p = dir_ / name;
        std::ofstream(p) << text;
        return p.string();
    }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

private:
    fs::path dir_;
};

nlohmann::json parse(const std::string& s) { return nlohmann::json::parse(s); }

std::string trim(std::string s) {
    while (!s.empty() && (s.back() == '\n' || s.back() == ' ')) s.pop_back();
    return s;
}

}  // namespace

TEST(CliDissim, QuartetOrderFour) {
    Outcome r = cli("dissim --tree " + data("quartet.nwk") + " --m 4");
    ASSERT_EQ(r.status, 0);
    nlohmann::json j = parse(r.out);
    EXPECT_EQ(j["entries"].size(), 1u);
    EXPECT_EQ(j["entries"]["1,2,3,4"], "5");
}

TEST(CliDissim, OrderTwoEqualsDistances) {
    Outcome a = cli("dissim --tree " + data("quartet.nwk") + " --m 2");
    Outcome b = cli("distances --tree " + data("quartet.nwk"));
    ASSERT_EQ(a.status, 0);
    ASSERT_EQ(b.status, 0);
    EXPECT_EQ(parse(a.out)["entries"], parse(b.out)["entries"]);
}

TEST(CliDissim, OracleOnRandomTrees) {
    Scratch s;
    for (int seed = 0; seed < 20; ++seed) {
        int n = 4 + seed % 5;
        Outcome t = cli("random-tree --n " + std::to_string(n) + " --seed " + std::to_string(seed));
        ASSERT_EQ(t.status, 0);
        std::string tree = s.write("t.nwk", t.out);
        int m = 2 + seed % (n - 1);
        EXPECT_EQ(cli("dissim --oracle --jobs 2 --tree " + tree + " --m " + std::to_string(m)).status, 0);
    }
}

TEST(CliDissim, WritesFileAndRejectsBadInput) {
    Scratch s;
    EXPECT_EQ(cli("dissim --tree " + data("quartet.nwk") + " --m 3 --out " + s.path("w.json")).status, 0);
    std::ifstream in(s.path("w.json"));
    nlohmann::json j = nlohmann::json::parse(in);
    EXPECT_EQ(j["entries"]["1,2,3"], "4");
    EXPECT_EQ(cli("dissim --tree " + data("quartet.nwk") + " --m 5").status, 2);
    EXPECT_EQ(cli("dissim --tree " + data("broken.nwk") + " --m 3").status, 2);
    EXPECT_EQ(cli("dissim --tree " + data("missing.nwk") + " --m 3").status, 2);
    EXPECT_EQ(cli("dissim --m 3").status, 2);
}

TEST(CliCheck, BumpedOnesFailWithWitness) {
    Outcome r = cli("check --metric " + data("ones5_bumped.json"));
    EXPECT_EQ(r.status, 1);
    nlohmann::json j = parse(r.out);
    EXPECT_EQ(j["pass"], false);
    EXPECT_EQ(j["witness"]["indices"], parse("[1,2,4,5]"));
}

TEST(CliCheck, OnesPass) {
    Outcome r = cli("check --metric " + data("ones5.json"));
    EXPECT_EQ(r.status, 0);
    EXPECT_EQ(parse(r.out)["pass"], true);
    EXPECT_EQ(cli("check --metric --strict " + data("ones5.json")).status, 0);
}

TEST(CliCheck, TreeTensorInTmn) {
    Scratch s;
    std::string tree = s.write("t.nwk", cli("random-tree --n 6 --seed 3").out);
    std::string tensor = s.write("w.json", cli("dissim --tree " + tree + " --m 3").out);
    EXPECT_EQ(cli("check --tmn 3 " + tensor).status, 0);
    EXPECT_EQ(cli("check --tmn 4 " + tensor).status, 2);
}

TEST(CliCheck, UltrametricAndM4AndL) {
    EXPECT_EQ(cli("check --ultra " + data("ultrametric3.json")).status, 0);
    EXPECT_EQ(cli("check --ultra " + data("ones5_bumped.json")).status, 1);
    EXPECT_EQ(cli("check --m4 " + data("ones5.json")).status, 0);
    Outcome m4 = cli("check --m4 " + data("ones5_bumped.json"));
    EXPECT_EQ(m4.status, 1);
    EXPECT_EQ(parse(m4.out)["equivalent"], true);
    EXPECT_EQ(parse(m4.out)["witness"]["indices"], parse("[1,2,4,5]"));

    Scratch s;
    std::string bumped = s.write("p.json", cli("pi4 " + data("ones5_bumped.json")).out);
    std::string ones = s.write("q.json", cli("pi4 " + data("ones5.json")).out);
    EXPECT_EQ(cli("check --in-l " + bumped).status, 1);
    EXPECT_EQ(cli("check --in-l " + ones).status, 0);
}

TEST(CliCheck, UsageErrors) {
    EXPECT_EQ(cli("check " + data("ones5.json")).status, 2);
    EXPECT_EQ(cli("check --metric --ultra " + data("ones5.json")).status, 2);
    EXPECT_EQ(cli("check --metric " + data("malformed.json")).status, 2);
    EXPECT_EQ(cli("check --metric " + data("truncated.json")).status, 2);
    EXPECT_EQ(cli("check --metric " + data("quartet_m3.json")).status, 2);
    EXPECT_EQ(cli("frobnicate").status, 2);
    EXPECT_EQ(cli("").status, 2);
    EXPECT_EQ(cli("--help").status, 0);
}

TEST(CliMembership, RandomTreeRoundTrip) {
    Scratch s;
    std::string tree_text = cli("random-tree --n 6 --seed 11").out;
    std::string tree = s.write("t.nwk", tree_text);
    std::string tensor = s.write("w.json", cli("dissim --tree " + tree + " --m 3").out);
    Outcome r = cli("membership3 " + tensor);
    ASSERT_EQ(r.status, 0);
    nlohmann::json j = parse(r.out);
    EXPECT_EQ(j["member"], true);
    EXPECT_TRUE(isomorphic(parse_newick(j["newick"].get<std::string>()), parse_newick(tree_text)));
}

TEST(CliMembership, PerturbedTensorIsRejected) {
    Scratch s;
    std::string tree = s.write("t.nwk", cli("random-tree --n 6 --seed 11").out);
    nlohmann::json w = parse(cli("dissim --tree " + tree + " --m 3").out);
    w["entries"]["1,2,3"] = to_string(parse_rational(w["entries"]["1,2,3"].get<std::string>()) + 1);
    Outcome r = cli("membership3 " + s.write("w.json", w.dump()));
    EXPECT_EQ(r.status, 1);
    EXPECT_EQ(parse(r.out)["member"], false);
}

TEST(CliMembership, ConstantTensorIsAStar) {
    Outcome r = cli("membership3 " + data("constant5_m3.json"));
    ASSERT_EQ(r.status, 0);
    WeightedTree t = parse_newick(parse(r.out)["newick"].get<std::string>());
    EXPECT_TRUE(isomorphic(t, parse_newick("(1:1/2,2:1/2,3:1/2,4:1/2,5:1/2);")));
}

TEST(CliMembership, SmallTensorIsUsageError) { EXPECT_EQ(cli("membership3 " + data("quartet_m3.json")).status, 2); }

TEST(CliCertify, QuartetTable) {
    Scratch s;
    Outcome r = cli("certify3 --tree " + data("quartet.nwk") + " --out " + s.path("c.json"));
    ASSERT_EQ(r.status, 0);
    EXPECT_NE(r.out.find("1,2,3: 4 = 4\n"), std::string::npos) << r.out;
    std::ifstream in(s.path("c.json"));
    nlohmann::json c = nlohmann::json::parse(in);
    EXPECT_EQ(c["E"], "3");
    EXPECT_EQ(c["newick"], "((1:1,2:1):1,3:1,4:1);");
}

TEST(CliCertify, CertificateOnStdoutVerifies) {
    Scratch s;
    std::string tree = s.write("t.nwk", cli("random-tree --n 6 --seed 5").out);
    Outcome r = cli("certify3 --tree " + tree);
    ASSERT_EQ(r.status, 0);
    Certificate3 c = certificate_from_json(parse(r.out));
    WeightedTree t = parse_newick(c.newick);
    EXPECT_TRUE(verify_certificate(c, phi_3(distance_matrix(t))).pass);
}

TEST(CliCertify, ZeroPendantIsUsageError) {
    EXPECT_EQ(cli("certify3 --tree " + data("zero_pendant.nwk")).status, 2);
}

TEST(CliGenerate, CountsAndRange) {
    EXPECT_EQ(trim(cli("count-topologies --n 5").out), "15");
    EXPECT_EQ(trim(cli("count-topologies --n 7").out), "945");
    EXPECT_EQ(trim(cli("count-topologies --n 3").out), "1");
    EXPECT_EQ(cli("count-topologies --n 2").status, 2);
    EXPECT_EQ(cli("count-topologies --n 9").status, 2);
}

TEST(CliGenerate, RandomTreeIsReproducible) {
    Outcome a = cli("random-tree --n 9 --seed 18446744073709551615 --shape caterpillar");
    Outcome b = cli("random-tree --n 9 --seed 18446744073709551615 --shape caterpillar");
    ASSERT_EQ(a.status, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(parse_newick(a.out).leaf_count(), 9);
    EXPECT_EQ(cli("random-tree --n 2 --seed 1").status, 2);
    EXPECT_EQ(cli("random-tree --n 5 --seed 1 --shape bush").status, 2);
}

TEST(CliReconstruct, RoundTrip) {
    Scratch s;
    std::string tree_text = cli("random-tree --n 8 --seed 2").out;
    std::string matrix = s.write("d.json", cli("distances --tree " + s.write("t.nwk", tree_text)).out);
    Outcome r = cli("reconstruct " + matrix);
    ASSERT_EQ(r.status, 0);
    EXPECT_TRUE(isomorphic(parse_newick(r.out), parse_newick(tree_text)));

    Outcome bad = cli("reconstruct " + data("ones5_bumped.json"));
    EXPECT_EQ(bad.status, 1);
    EXPECT_EQ(parse(bad.out)["witness"]["indices"], parse("[1,2,4,5]"));
}

TEST(CliDeterminism, ParallelOutputIsIdentical) {
    Scratch s;
    std::string tree = s.write("t.nwk", cli("random-tree --n 9 --seed 7").out);
    EXPECT_EQ(cli("dissim --tree " + tree + " --m 5 --jobs 1").out, cli("dissim --tree " + tree + " --m 5 --jobs 3").out);
}
