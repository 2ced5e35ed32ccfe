#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

// End-to-end checks of the cwmw binary: exit codes, JSON fields,
// byte-level determinism. argv[1] is the binary, argv[2] a scratch dir.

#include <nlohmann/json.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <string>

namespace {

std::string g_binary;
std::string g_workdir;

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run(const std::string& args) {
    const std::string cmd = g_binary + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    char buf[4096];
    std::size_t got = 0;
    while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) {
        r.out.append(buf, got);
    }
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string write_file(const std::string& name, const std::string& content) {
    const std::string path = g_workdir + "/" + name;
    std::ofstream out(path);
    REQUIRE(out.good());
    out << content;
    return path;
}

std::string mixed_csv() {
    std::string text = "cluster,group,value\n";
    const double values[] = {0.3, 1.7, -0.4, 0.9, 2.2, -1.1, 0.5, 1.05};
    int i = 0;
    for (const double v : values) {
        text += "a" + std::to_string(i) + ",1," + std::to_string(v) + "\n";
        text += "b" + std::to_string(i) + ",2," + std::to_string(v + 0.6) + "\n";
        text += "c" + std::to_string(i) + ",1," + std::to_string(v - 0.2) + "\n";
        text += "c" + std::to_string(i) + ",2," + std::to_string(v + 0.4) + "\n";
        ++i;
    }
    return text;
}

} // namespace

TEST_CASE("analyze: default method is the t-referenced test") {
    const std::string csv = write_file("mixed.csv", mixed_csv());
    const auto r = run("analyze --input " + csv);
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["method"] == "tilde-t");
    CHECK(j["reference"] == "student_t");
    CHECK(j.contains("df"));
    CHECK(j["alpha"] == 0.05);
    CHECK(j["seed"] == 20240101);
    CHECK(j["estimate"].get<double>() >= 0.0);
    CHECK(j["estimate"].get<double>() <= 1.0);
    CHECK(j["warnings"].is_array());
}

TEST_CASE("analyze: point-only methods omit test fields") {
    const std::string csv = write_file("mixed2.csv", mixed_csv());
    const auto r = run("analyze --input " + csv + " --method ignorable-u");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK_FALSE(j.contains("statistic"));
    CHECK_FALSE(j.contains("p_value"));
    CHECK_FALSE(j.contains("variance"));
    CHECK(j.contains("estimate"));
}

TEST_CASE("analyze: normal-reference methods omit df") {
    const std::string csv = write_file("mixed3.csv", mixed_csv());
    for (const std::string method : {"tilde", "hat", "hat-star", "hoffman"}) {
        const auto r = run("analyze --input " + csv + " --method " + method + " --resamples 300");
        REQUIRE(r.exit_code == 0);
        const auto j = nlohmann::json::parse(r.out);
        CHECK_FALSE(j.contains("df"));
        CHECK(j["reference"] == "standard_normal");
    }
}

TEST_CASE("analyze: exit 3 on zero variance") {
    const std::string csv = write_file("two.csv", "cluster,group,value\na,1,1.0\nb,2,2.0\n");
    const auto r = run("analyze --input " + csv + " --method tilde");
    CHECK(r.exit_code == 3);
}

TEST_CASE("analyze: exit 2 on one-group input") {
    const std::string csv = write_file("onegroup.csv", "cluster,group,value\na,1,1.0\nb,1,2.0\n");
    const auto r = run("analyze --input " + csv + " --method tilde");
    CHECK(r.exit_code == 2);
}

TEST_CASE("analyze: exit 2 on malformed csv and missing file") {
    const std::string csv = write_file("bad.csv", "cluster,group,value\na,7,1.0\n");
    CHECK(run("analyze --input " + csv).exit_code == 2);
    CHECK(run("analyze --input " + g_workdir + "/absent.csv").exit_code == 2);
    CHECK(run("analyze --input " + csv + " --method bogus").exit_code == 2);
}

TEST_CASE("analyze: exit 4 when no cross-cluster comparison exists") {
    const std::string csv = write_file("onecluster.csv", "cluster,group,value\na,1,1.0\na,2,2.0\n");
    const auto r = run("analyze --input " + csv + " --method tilde");
    CHECK(r.exit_code == 4);
}

TEST_CASE("analyze: exit 3 on a forced negative monte carlo variance") {
    std::string text = "cluster,group,value\n";
    for (int i = 0; i < 10; ++i) {
        text += "c" + std::to_string(i) + ",1,0.0\n";
        text += "c" + std::to_string(i) + ",2,0.0\n";
    }
    const std::string csv = write_file("tied.csv", text);
    const auto r = run("analyze --input " + csv + " --method hoffman --resamples 300");
    CHECK(r.exit_code == 3);
}

TEST_CASE("analyze: byte-identical output for a fixed seed") {
    const std::string csv = write_file("mixed4.csv", mixed_csv());
    const auto a = run("analyze --input " + csv + " --method hat --seed 99 --resamples 500");
    const auto b = run("analyze --input " + csv + " --method hat --seed 99 --resamples 500");
    REQUIRE(a.exit_code == 0);
    CHECK(a.out == b.out);
    const auto c = run("analyze --input " + csv + " --method hat --seed 100 --resamples 500");
    CHECK(a.out != c.out);
}

TEST_CASE("theory: closed forms and oracle") {
    const auto r = run("theory --c1 2 --c2 3");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["p"].get<double>() == doctest::Approx(0.6307).epsilon(1e-3));
    CHECK(j["p0"].get<double>() == doctest::Approx(0.5258).epsilon(1e-3));
    CHECK(j["mu_d"] == -1.0);

    const auto eq = run("theory --c1 5 --c2 5");
    const auto je = nlohmann::json::parse(eq.out);
    CHECK(je["p"].get<double>() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(je["p0"].get<double>() == doctest::Approx(0.5).epsilon(1e-12));

    const auto o = run("theory --c1 2 --c2 7 --oracle-draws 100000");
    const auto jo = nlohmann::json::parse(o.out);
    CHECK(jo["p"].get<double>() == doctest::Approx(0.7505).epsilon(1e-3));
    CHECK(jo["p0"].get<double>() == doctest::Approx(0.3964).epsilon(1e-3));
    CHECK(jo.contains("p_mc"));
    CHECK(std::abs(jo["p_mc"].get<double>() - jo["p"].get<double>()) <
          4.0 * jo["se_p"].get<double>());

    CHECK(run("theory --c1 0 --c2 3").exit_code == 2);
}

TEST_CASE("simulate: reports are identical across worker counts") {
    const std::string cfg = write_file(
        "scenario.cfg",
        "n1 = 8\nn2 = 6\nnc = 6\nicg_law = fixed\ndistribution = gaussian\n"
        "sigma1_sq = 1\nsigma2_sq = 1\nrho1 = 0.1\nrho2 = 0.1\nrho12 = 0.2\n"
        "c1 = 2\nc2 = 3\nalpha_level = 0.05\nseed = 31415\n");
    const std::string out1 = g_workdir + "/rep1";
    const std::string out8 = g_workdir + "/rep8";
    REQUIRE(run("simulate --config " + cfg + " --reps 80 --methods tilde,tilde-t,hat-star "
                "--out " + out1 + " --jobs 1").exit_code == 0);
    REQUIRE(run("simulate --config " + cfg + " --reps 80 --methods tilde,tilde-t,hat-star "
                "--out " + out8 + " --jobs 8").exit_code == 0);
    const auto slurp = [](const std::string& path) {
        std::ifstream in(path);
        REQUIRE(in.good());
        return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    };
    CHECK(slurp(out1 + ".csv") == slurp(out8 + ".csv"));
    CHECK(slurp(out1 + ".json") == slurp(out8 + ".json"));
    CHECK(slurp(out1 + ".csv").rfind("method,replicates,valid,rejection_rate,coverage_p,", 0) == 0);
}

TEST_CASE("simulate: exit 2 on an invalid config") {
    const std::string cfg = write_file("bad.cfg", "n1 = 5\n");
    CHECK(run("simulate --config " + cfg + " --reps 5").exit_code == 2);
}

int main(int argc, char** argv) {
    if (argc < 3) {
        std::fprintf(stderr, "usage: test_cli <cwmw-binary> <workdir>\n");
        return 1;
    }
    g_binary = argv[1];
    g_workdir = argv[2];
    doctest::Context ctx;
    return ctx.run();
}
