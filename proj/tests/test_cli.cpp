#include <doctest.h>

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Run {
    int status = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch()
{
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / ("resonance-cli-" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

Run kit(const std::string& args, const std::string& env = "")
{
    const auto out = scratch() / "stdout";
    const auto err = scratch() / "stderr";
    const std::string cmd = env + " " KIT_PATH " " + args + " > " + out.string() + " 2> " + err.string();
    const int raw = std::system(cmd.c_str());
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(out), slurp(err)};
}

std::string model(const std::string& name)
{
    return std::string(TEST_DATA_DIR) + "/" + name;
}

std::vector<std::vector<std::string>> csv(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');)
            cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST_CASE("spectrum")
{
    const auto r = kit("spectrum " + model("t-model.json"));
    REQUIRE(r.status == 0);
    const auto rows = csv(r.out);
    REQUIRE(rows.size() == 5);
    CHECK(r.out.rfind("n,re_lambda,im_lambda,re_E,im_E,class,norm_residual\n", 0) == 0);
    CHECK(rows[2][5] == "AntiResonant");
    CHECK(rows[3][5] == "Resonant");
    CHECK(std::abs(std::stod(rows[3][1]) - 0.502834) < 1e-6);
    CHECK(std::abs(std::stod(rows[3][2]) - 1.21680) < 1e-5);
    CHECK(rows[1][5] == "Bound");
    CHECK(rows[4][5] == "Bound");

    const auto j = kit("spectrum " + model("m1.json") + " --format json");
    REQUIRE(j.status == 0);
    const auto doc = nlohmann::json::parse(j.out);
    REQUIRE(doc["states"].size() == 2);
    CHECK(doc["states"][0]["class"] == "AntiResonant");
    CHECK(doc["states"][1]["class"] == "Resonant");
    CHECK(doc["states"][1]["partner"] == 1);
    CHECK(doc["states"][0]["psi"].size() == 1);

    const auto bad = kit("spectrum " + model("bad.json"));
    CHECK(bad.status == 2);
    CHECK(bad.err.find("NonSymmetricDot") != std::string::npos);
}

TEST_CASE("degenerate spectrum needs --allow-warnings")
{
    const auto strict = kit("spectrum " + model("degenerate.json"));
    CHECK(strict.status == 1);
    CHECK(strict.err.find("DegenerateSpectrum") != std::string::npos);
    const auto relaxed = kit("spectrum " + model("degenerate.json") + " --allow-warnings");
    CHECK(relaxed.status == 0);
    CHECK(csv(relaxed.out).size() == 5);
    CHECK(relaxed.err.find("warning") != std::string::npos);
}

TEST_CASE("verify")
{
    const auto t = kit("verify " + model("t-model.json") + " --tol 1e-9");
    REQUIRE(t.status == 0);
    const auto rows = csv(t.out);
    REQUIRE(rows.size() == 7);
    for (std::size_t r = 1; r <= 5; ++r)
        CHECK(rows[r][2] == "PASS");
    CHECK(rows[1][1] == "unity");
    CHECK(rows[6][0] == "summary");

    const auto s = kit("verify " + model("theta1.json"));
    CHECK(s.status == 0);
    const auto srows = csv(s.out);
    CHECK(srows[1][1] == "unity");
    CHECK(srows[1][2] == "SKIP");
    CHECK(srows[1][5].find("IncompleteSpectrum") != std::string::npos);

    const auto sweep = kit("verify --random 100 --n 4 --seed 3");
    CHECK(sweep.status == 0);
    CHECK(sweep.err.find("100/100 PASS") != std::string::npos);
    const auto threaded = kit("--jobs 4 verify --random 100 --n 4 --seed 3");
    CHECK(threaded.out == sweep.out);

    const auto strict = kit("verify " + model("t-model.json") + " --tol 1e-20");
    CHECK(strict.status == 1);
}

TEST_CASE("survival")
{
    const auto r = kit("survival " + model("t-model.json") + " --i 1 --j 1 --t 0:100:0.5 --method quadrature");
    REQUIRE(r.status == 0);
    const auto rows = csv(r.out);
    REQUIRE(rows.size() == 202);
    CHECK(rows[0] == std::vector<std::string>{"t", "re", "im", "abs2", "method", "group"});
    CHECK(std::abs(std::stod(rows[1][3]) - 1.0) < 1e-10);
    CHECK(rows[1][4] == "quadrature");

    const auto env = kit("survival " + model("t-model.json") + " --i 1 --j 1 --t 0:100:0.5", "RESONANCE_KIT_JOBS=3");
    CHECK(env.out == r.out);

    const auto g = kit("survival " + model("m1.json") + " --t 10 --method poles --groups");
    REQUIRE(g.status == 0);
    const auto grows = csv(g.out);
    REQUIRE(grows.size() == 7);
    CHECK(grows[1][5] == "total");
    CHECK(grows[2][5] == "res");
    CHECK(std::abs(std::stod(grows[2][1]) - 0.0650498964) < 1e-9);

    CHECK(kit("survival " + model("m1.json") + " --t 10 --groups").status == 2);
    CHECK(kit("survival " + model("m1.json") + " --t 10 --i 3").status == 2);
    CHECK(kit("survival " + model("m1.json") + " --t 1:x:2").status == 2);
    CHECK(kit("survival " + model("m1.json") + " --t 5 --method magic").status == 2);

    const auto o = kit("survival " + model("m1.json") + " --t 5 --method oracle --lead-length 200");
    const auto q = kit("survival " + model("m1.json") + " --t 5");
    REQUIRE(o.status == 0);
    CHECK(std::abs(std::stod(csv(o.out)[1][1]) - std::stod(csv(q.out)[1][1])) < 1e-8);
    // the requested time does not fit the requested lead: the caller's problem
    CHECK(kit("survival " + model("m1.json") + " --t 500 --method oracle --lead-length 100").status == 2);
    // unreachable tolerance is a numerical failure
    CHECK(kit("--tol 1e-30 survival " + model("m1.json") + " --t 5").status == 1);
}

TEST_CASE("escape")
{
    const auto r = kit("escape " + model("t-model.json") + " --lead R --x 20 --t 15,30 --method poles --groups");
    REQUIRE(r.status == 0);
    const auto rows = csv(r.out);
    REQUIRE(rows.size() == 13);
    // t = 15: res dominates the other groups
    const double res = std::stod(rows[2][3]);
    CHECK(rows[2][5] == "res");
    CHECK(res > std::stod(rows[4][3]));
    CHECK(res > std::stod(rows[5][3]));

    const auto k = kit("escape " + model("t-model.json") + " --lead R --k 1.5707963267948966 --t 40");
    REQUIRE(k.status == 0);
    const auto ko = kit("escape " + model("t-model.json") + " --lead R --k 1.5707963267948966 --t 40 --method oracle");
    REQUIRE(ko.status == 0);
    CHECK(std::abs(std::stod(csv(k.out)[1][1]) - std::stod(csv(ko.out)[1][1])) < 1e-4);

    CHECK(kit("escape " + model("t-model.json") + " --lead Q --x 2 --t 1").status == 2);
    CHECK(kit("escape " + model("t-model.json") + " --lead R --t 1").status == 2);
    CHECK(kit("escape " + model("t-model.json") + " --lead R --x 1 --k 1 --t 1").status == 2);
    CHECK(kit("escape " + model("t-model.json") + " --lead R --k 4 --t 1").status == 2);
}

TEST_CASE("greens")
{
    const auto t = kit("greens " + model("t-model.json") + " --transmission L,R --E -2:2:0.5");
    REQUIRE(t.status == 0);
    const auto rows = csv(t.out);
    REQUIRE(rows.size() == 10);
    CHECK(rows[0] == std::vector<std::string>{"E", "k", "T"});
    CHECK(std::stod(rows[1][2]) == 0.0);
    CHECK(std::stod(rows[9][2]) == 0.0);
    CHECK(std::abs(std::stod(rows[5][2]) - 0.7429305912596401) < 1e-12);

    const auto e = kit("greens " + model("t-model.json") + " --element 1,2 --element L:3,R:2 --E -1.5:1.5:0.25");
    REQUIRE(e.status == 0);
    const auto erows = csv(e.out);
    CHECK(erows[0][1] == "re_G_1_2");
    CHECK(erows[0][4] == "re_G_L3_R2");
    for (std::size_t r = 1; r < erows.size(); ++r) {
        CHECK(std::stod(erows[r][3]) < 1e-9);
        CHECK(std::stod(erows[r][6]) < 1e-9);
    }

    const auto l = kit("greens " + model("m1.json") + " --element 1,1 --lambda 0.5");
    REQUIRE(l.status == 0);
    CHECK(std::abs(std::stod(csv(l.out)[1][4]) + 0.42105263157894735) < 1e-14);

    CHECK(kit("greens " + model("t-model.json") + " --element 1,9 --E 0").status == 2);
    CHECK(kit("greens " + model("t-model.json") + " --element 1,1").status == 2);
    CHECK(kit("greens " + model("m1.json") + " --element 1,1 --lambda 0").status == 2);
}

TEST_CASE("packet")
{
    const auto r = kit("packet " + model("t-model.json") + " --x0 40 --width 10 --k0 0 --t -20:20:20 --components");
    REQUIRE(r.status == 0);
    const auto rows = csv(r.out);
    CHECK(rows[0] == std::vector<std::string>{"t", "lead", "x", "re", "im", "abs2", "component"});
    // 3 frames x 6 fields (total, free, 4 states) x (2 dot + 2 x 200 lead rows)
    CHECK(rows.size() == 1 + 3 * 6 * 402);
    CHECK(rows[1][1] == "dot");
    CHECK(rows[1][6] == "total");
    CHECK(rows[403][6] == "free");

    CHECK(kit("packet " + model("t-model.json") + " --t 1 --method poles").status == 2);
    CHECK(kit("packet " + model("t-model.json") + " --t 1 --method oracle --components").status == 2);
    CHECK(kit("packet " + model("t-model.json") + " --t 1 --x-max 50").status == 2);
}

TEST_CASE("output file, manifest and determinism")
{
    const auto path = (scratch() / "spectrum.csv").string();
    const auto r = kit("--out " + path + " spectrum " + model("t-model.json"));
    REQUIRE(r.status == 0);
    CHECK(r.out.empty());
    const auto first = slurp(path);
    CHECK(csv(first).size() == 5);
    const auto manifest = nlohmann::json::parse(slurp(path + ".manifest.json"));
    CHECK(manifest["command"] == "spectrum");
    CHECK(manifest["model"] == model("t-model.json"));
    CHECK(manifest.contains("version"));
    CHECK(manifest.contains("wall_seconds"));
    CHECK(manifest["tolerances"]["tol"] == 1e-9);
    REQUIRE(kit("--out " + path + " spectrum " + model("t-model.json")).status == 0);
    CHECK(slurp(path) == first);

    const auto help = kit("--help");
    CHECK(help.status == 0);
    CHECK(help.out.find("Exit codes") != std::string::npos);
    CHECK(kit("").status == 2);
    CHECK(kit("bogus").status == 2);
}
