#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <string>
#include <unistd.h>

#include "json.hpp"
#include "rm/rm.h"

using json = nlohmann::json;

namespace {

// owns one result and parses it
struct Out {
    rm_result* r = nullptr;
    ~Out() { rm_result_free(r); }
    std::string text() const { return rm_result_text(r); }
    json parse() const { return json::parse(text()); }
};

}  // namespace

TEST_CASE("pcf handle lifecycle") {
    rm_pcf* p = nullptr;
    REQUIRE(rm_pcf_new("34*n^3+51*n^2+27*n+5", "-n^6", &p) == RM_OK);
    Out e;
    REQUIRE(rm_pcf_eval(p, 500, 60, nullptr, &e.r) == RM_OK);
    auto j = e.parse();
    CHECK(j["digits"].get<long>() >= 60);
    CHECK(j["value"].get<std::string>().rfind("4.99144423548424481209", 0) == 0);
    Out fr;
    REQUIRE(rm_pcf_fr(p, 1024, &fr.r) == RM_OK);
    CHECK(fr.parse()["verdict"] == "FactorialReduction");
    Out js;
    REQUIRE(rm_pcf_json(p, &js.r) == RM_OK);
    CHECK(js.parse()["b"] == "-n^6");
    Out bad;
    CHECK(rm_pcf_eval(p, 500, 60, "sideways", &bad.r) == RM_ERR_INVALID_ARGUMENT);
    rm_pcf_free(p);
    rm_pcf_free(nullptr);
}

TEST_CASE("errors carry a code and a message") {
    rm_pcf* p = nullptr;
    CHECK(rm_pcf_new("n^", "1", &p) == RM_ERR_SYNTAX);
    CHECK(p == nullptr);
    CHECK(std::string(rm_last_error()).find("at byte") != std::string::npos);
    CHECK(rm_pcf_new("m", "1", &p) == RM_ERR_UNKNOWN_VARIABLE);
    CHECK(rm_pcf_new(nullptr, "1", &p) == RM_ERR_INVALID_ARGUMENT);
    CHECK(std::string(rm_status_string(RM_ERR_SYNTAX)).size() > 0);
    Out c;
    CHECK(rm_constant("zeta99", 50, 0, &c.r) == RM_ERR_UNKNOWN_CONSTANT);
    rm_field* f = nullptr;
    CHECK(rm_field_load("nosuch", &f) == RM_ERR_UNKNOWN_FIELD);
}

TEST_CASE("constants and matching") {
    Out c;
    REQUIRE(rm_constant("pi", 30, 1, &c.r) == RM_OK);
    auto j = c.parse();
    CHECK(j["value"].get<std::string>().rfind("3.14159265358979323846", 0) == 0);
    CHECK(j["verified_digits"].get<long>() >= 30);

    // 6/zeta3 from the fraction, then matched back
    rm_pcf* a = nullptr;
    REQUIRE(rm_pcf_new("34*n^3+51*n^2+27*n+5", "-n^6", &a) == RM_OK);
    Out lim;
    REQUIRE(rm_pcf_eval(a, 500, 60, nullptr, &lim.r) == RM_OK);
    std::string v = lim.parse()["value"];
    Out m;
    REQUIRE(rm_match_value(v.c_str(), "zeta3", 10, 0, &m.r) == RM_OK);
    CHECK(m.text().find("zeta3") != std::string::npos);
    Out none;
    CHECK(rm_match_value("1.5", "zeta3", 10, 0, &none.r) != RM_OK);
    Out viapcf;
    CHECK(rm_match_pcf(a, 500, "zeta3", 10, 0, &viapcf.r) == RM_OK);
    rm_pcf_free(a);

    rm_pcf* p = nullptr;
    REQUIRE(rm_family("zeta_hat", R"({"s":5,"R":1})", &p) == RM_OK);
    Out pj;
    REQUIRE(rm_pcf_json(p, &pj.r) == RM_OK);
    CHECK(pj.parse()["b"] == "-n^10-n^9");
    rm_pcf_free(p);
}

TEST_CASE("field operations") {
    rm_field* f = nullptr;
    REQUIRE(rm_field_load("zeta3", &f) == RM_OK);
    Out v;
    CHECK(rm_field_verify(f, 10, &v.r) == RM_OK);
    CHECK(v.parse()["pass"] == true);
    Out lim;
    REQUIRE(rm_field_limit(f, "1,1", "1,1", 500, 40, &lim.r) == RM_OK);
    CHECK(lim.parse()["value"].get<std::string>().rfind("0.8319073725807", 0) == 0);
    Out cf;
    REQUIRE(rm_delta_closed(f, "1,1", 1500, &cf.r) == RM_OK);
    CHECK(cf.parse()["eigenvalues"]["max"] == "17+12*sqrt(2)");
    Out conv;
    REQUIRE(rm_field_topcf(f, "1,1", &conv.r) == RM_OK);
    CHECK(conv.parse()["a"] == "34*n^3+51*n^2+27*n+5");

    rm_field* g = nullptr;
    REQUIRE(rm_field_coboundary(f, R"(["1","x","0","1"])", &g) == RM_OK);
    Out gv;
    CHECK(rm_field_verify(g, 6, &gv.r) == RM_OK);
    rm_field_free(g);

    rm_field* s = nullptr;
    REQUIRE(rm_field_shift(f, "1/3,0", &s) == RM_OK);
    Out sj;
    REQUIRE(rm_field_json(s, &sj.r) == RM_OK);
    CHECK(sj.parse()["dimension"] == 2);
    rm_field_free(s);

    Out map;
    REQUIRE(rm_delta_map(f, 2, 2, "zeta3", &map.r) == RM_OK);
    CHECK(map.text().rfind("x,y,delta", 0) == 0);
    rm_field_free(f);

    rm_field* e = nullptr;
    REQUIRE(rm_field_construct(1, "0,-1,-1,0", nullptr, &e) == RM_OK);
    Out ej;
    REQUIRE(rm_field_json(e, &ej.r) == RM_OK);
    CHECK(ej.parse().contains("construction"));
    rm_field_free(e);
}

TEST_CASE("a broken field reports no result") {
    std::string bad = R"({"dimension":2,"vars":["x","y"],"matrices":[["0","x","1","y"],["1","0","0","x"]]})";
    rm_field* f = nullptr;
    REQUIRE(rm_field_load(bad.c_str(), &f) == RM_OK);
    Out v;
    CHECK(rm_field_verify(f, 5, &v.r) == RM_NO_RESULT);
    CHECK(v.parse()["pass"] == false);
    rm_field_free(f);
}

TEST_CASE("coordinator and worker through the C API") {
    auto store = std::filesystem::temp_directory_path() / ("rm_capi_" + std::to_string(::getpid()));
    std::filesystem::remove_all(store);
    json j = json::parse(R"({"schemes":[{"id":"s","kind":"sigma","d":3,"c":[[16,17],[-12,-12]],"B":[1,1],"fr_depth":512}],
                             "chunk_size":1,"lease_seconds":30,"constants":["zeta3"]})");
    j["store"] = store.string();
    std::string cfg = j.dump();
    rm_coordinator* c = nullptr;
    CHECK(rm_coordinator_start(R"({"schemes":[],"typo":1})", &c) == RM_ERR_INVALID_ARGUMENT);
    REQUIRE(rm_coordinator_start(cfg.c_str(), &c) == RM_OK);
    CHECK(rm_coordinator_port(c) > 0);
    std::string addr = "127.0.0.1:" + std::to_string(rm_coordinator_port(c));
    Out w;
    REQUIRE(rm_worker_run(addr.c_str(), 1, nullptr, &w.r) == RM_OK);
    CHECK(w.parse()["chunks"] == 2);
    CHECK(rm_coordinator_wait(c, 60) == RM_OK);
    Out st;
    REQUIRE(rm_coordinator_status(c, &st.r) == RM_OK);
    CHECK(st.parse()["schemes"]["s"]["done"] == 2);
    rm_coordinator_stop(c);
    std::filesystem::remove_all(store);
}
