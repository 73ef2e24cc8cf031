// Command-line frontend over the C API. JSON (or CSV) on stdout, diagnostics on stderr.
// Exit codes: 0 success, 1 no result, 2 usage, 3 runtime error.
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "rm/rm.h"

namespace {

struct Failure {
    rm_status status;
};

int exit_code(rm_status s) {
    switch (s) {
        case RM_OK: return 0;
        case RM_NO_RESULT:
        case RM_ERR_NO_MATCH:
        case RM_ERR_LOW_CONFIDENCE: return 1;
        case RM_ERR_INVALID_ARGUMENT:
        case RM_ERR_SYNTAX:
        case RM_ERR_UNKNOWN_VARIABLE:
        case RM_ERR_UNKNOWN_CONSTANT:
        case RM_ERR_UNKNOWN_FIELD:
        case RM_ERR_ARITY: return 2;
        default: return 3;
    }
}

void check(rm_status s) {
    if (s == RM_OK) return;
    std::cerr << "error: " << rm_status_string(s) << ": " << rm_last_error() << "\n";
    throw Failure{s};
}

struct Result {
    rm_result* r = nullptr;
    ~Result() { rm_result_free(r); }
};

void print(rm_status s, Result& res) {
    if (res.r) std::cout << rm_result_text(res.r) << (s == RM_OK || s == RM_NO_RESULT ? "\n" : "");
    check(s);
}

struct Pcf {
    rm_pcf* p = nullptr;
    ~Pcf() { rm_pcf_free(p); }
};

struct Field {
    rm_field* f = nullptr;
    ~Field() { rm_field_free(f); }
};

void load_field(Field& out, const std::string& spec, const std::string& shift) {
    check(rm_field_load(spec.c_str(), &out.f));
    if (!shift.empty()) {
        Field shifted;
        check(rm_field_shift(out.f, shift.c_str(), &shifted.f));
        std::swap(out.f, shifted.f);
    }
}

std::string read_scheme(const std::string& s) {
    if (!s.empty() && s.front() == '{') return s;
    std::ifstream in(s);
    if (!in) throw CLI::ValidationError("--scheme", "not JSON and not a readable file: " + s);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void on_signal(int) { rm_worker_request_stop(); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Continued fractions, conservative matrix fields and irrationality measures"};
    app.require_subcommand(1);

    // pcf
    auto* pcf = app.add_subcommand("pcf", "polynomial continued fractions");
    pcf->require_subcommand(1);
    std::string a, b, accel = "auto";
    long depth = 1000, digits = 50, max_depth = 4096;
    auto* eval = pcf->add_subcommand("eval", "limit with certified digits");
    eval->add_option("--a", a, "a(n)")->required();
    eval->add_option("--b", b, "b(n)")->required();
    eval->add_option("--depth", depth, "maximum depth");
    eval->add_option("--digits", digits, "target digits");
    eval->add_option("--accel", accel, "none|richardson|auto");
    auto* fr = pcf->add_subcommand("fr", "factorial-reduction test");
    fr->add_option("--a", a, "a(n)")->required();
    fr->add_option("--b", b, "b(n)")->required();
    fr->add_option("--max-depth", max_depth, "depth (>= 256)");

    // match
    auto* match = app.add_subcommand("match", "PSLQ match against catalog constants");
    std::string value, constants = "zeta3";
    int margin = 10;
    bool from_pcf = false, products = false;
    match->add_option("--value", value, "decimal value");
    match->add_flag("--from-pcf", from_pcf, "match the limit of --a/--b");
    match->add_option("--a", a, "a(n)");
    match->add_option("--b", b, "b(n)");
    match->add_option("--depth", depth, "depth for --from-pcf");
    match->add_option("--constants", constants, "comma separated names");
    match->add_option("--margin", margin, "confidence margin");
    match->add_flag("--products", products, "include pairwise products");

    // family
    auto* family = app.add_subcommand("family", "members of parametric families");
    std::string kind, params = "{}";
    family->add_option("--kind", kind, "zigzag|zeta_hat|polylog|zeta3_alpha|zeta2_alpha|sigma")->required();
    family->add_option("--params", params, "JSON object");

    // constant
    auto* constant = app.add_subcommand("constant", "catalog constants");
    std::string cname;
    bool verify = false;
    constant->add_option("--name", cname, "constant name")->required();
    constant->add_option("--digits", digits, "digits");
    constant->add_flag("--verify", verify, "cross-check with the second series");

    // cmf
    auto* cmf = app.add_subcommand("cmf", "conservative matrix fields");
    cmf->require_subcommand(1);
    std::string field = "zeta3", start, dir, shift, u, cpar, fam;
    int grid = 50, degree = 1;
    long steps = 1500;
    auto* verify_cmd = cmf->add_subcommand("verify", "exact cocycle check");
    verify_cmd->add_option("--field", field, "catalog name, JSON or file");
    verify_cmd->add_option("--grid", grid, "grid bound");
    auto* limit = cmf->add_subcommand("limit", "trajectory limit");
    limit->add_option("--field", field, "catalog name, JSON or file");
    limit->add_option("--start", start, "comma separated start (rationals allowed)");
    limit->add_option("--dir", dir, "comma separated direction");
    limit->add_option("--steps", steps, "unit cells");
    limit->add_option("--digits", digits, "target digits");
    auto* topcf = cmf->add_subcommand("topcf", "trajectory to continued fraction");
    topcf->add_option("--field", field, "catalog name, JSON or file");
    topcf->add_option("--dir", dir, "comma separated direction");
    auto* construct = cmf->add_subcommand("construct", "field from the linear/quadratic conditions");
    construct->add_option("--degree", degree, "1, 2 or 3")->required();
    construct->add_option("--c", cpar, "comma separated parameters")->required();
    construct->add_option("--family", fam, "f1|f2|f3 for degree 3");
    auto* cob = cmf->add_subcommand("coboundary", "conjugate by U");
    cob->add_option("--field", field, "catalog name, JSON or file");
    cob->add_option("--u", u, "JSON list of four polynomials")->required();
    auto* shift_cmd = cmf->add_subcommand("shift", "shift the variables");
    shift_cmd->add_option("--field", field, "catalog name, JSON or file");
    shift_cmd->add_option("--shifts", shift, "comma separated rationals")->required();

    // delta
    auto* delta = app.add_subcommand("delta", "irrationality measures");
    delta->require_subcommand(1);
    std::string target = "limit", out_path, method = "lls";
    int xmax = 40, ymax = 40, horizon = 60;
    auto add_field = [&](CLI::App* c) {
        c->add_option("--field", field, "catalog name, JSON or file");
        c->add_option("--shift", shift, "shift the field first, e.g. 1/3,0");
    };
    auto* dmap = delta->add_subcommand("map", "delta on a grid (CSV)");
    add_field(dmap);
    dmap->add_option("--xmax", xmax, "grid width");
    dmap->add_option("--ymax", ymax, "grid height");
    dmap->add_option("--constant", target, "catalog name, rational or 'limit'");
    dmap->add_option("--out", out_path, "write CSV here instead of stdout");
    auto* closed = delta->add_subcommand("closed", "delta from the leading eigenvalues");
    add_field(closed);
    closed->add_option("--dir", dir, "comma separated direction");
    closed->add_option("--steps", steps, "steps for the growth rate");
    auto* emp = delta->add_subcommand("empirical", "delta along a trajectory");
    add_field(emp);
    emp->add_option("--dir", dir, "comma separated direction");
    emp->add_option("--constant", target, "catalog name, rational or 'limit'");
    emp->add_option("--steps", steps, "unit cells");
    auto* opt = delta->add_subcommand("optimize", "trajectory search");
    add_field(opt);
    opt->add_option("--method", method, "greedy|lls")->check(CLI::IsMember({"greedy", "lls"}));
    opt->add_option("--horizon", horizon, "steps explored");
    opt->add_option("--constant", target, "catalog name, rational or 'limit'");
    opt->add_option("--steps", steps, "lattice steps for the tail delta")->default_val(600);

    // zeta5
    auto* z5 = app.add_subcommand("zeta5", "zeta(5) combinations");
    z5->require_subcommand(1);
    auto* combine = z5->add_subcommand("combine", "combine PCF[s,R] for s=2..5");
    std::string rvals = "1,1,1,1", mode = "search";
    long zdepth = 80;
    combine->add_option("--r", rvals, "R for s=2..5");
    combine->add_option("--depth", zdepth, "depth (lattice steps)");
    combine->add_option("--mode", mode, "fixed|lattice|search")->check(CLI::IsMember({"fixed", "lattice", "search"}));

    // serve / work
    auto* serve = app.add_subcommand("serve", "run the search coordinator until drained");
    int port = 8765;
    std::string host = "127.0.0.1", store = "rm_store";
    std::vector<std::string> schemes;
    long chunk_size = 10000, lease = -1;
    double timeout = 0;
    serve->add_option("--port", port, "port (0: any)");
    serve->add_option("--host", host, "bind address");
    serve->add_option("--scheme", schemes, "scheme JSON or file (repeatable)")->required();
    serve->add_option("--chunk-size", chunk_size, "candidates per chunk");
    serve->add_option("--lease", lease, "lease seconds (default RM_LEASE_SECONDS or 1800)");
    serve->add_option("--store", store, "store directory");
    serve->add_option("--constants", constants, "constants for on-site matching");
    serve->add_option("--timeout", timeout, "give up after this many seconds (0: never)");
    auto* work = app.add_subcommand("work", "run a worker");
    std::string server, options;
    int parallelism = 0;
    work->add_option("--server", server, "host:port (default RM_SERVER_ADDR)");
    work->add_option("--parallelism", parallelism, "threads (default RM_WORKER_PARALLELISM or 1)");
    work->add_option("--options", options, "worker options JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        Result res;
        if (*eval) {
            Pcf p;
            check(rm_pcf_new(a.c_str(), b.c_str(), &p.p));
            print(rm_pcf_eval(p.p, depth, digits, accel.c_str(), &res.r), res);
        } else if (*fr) {
            Pcf p;
            check(rm_pcf_new(a.c_str(), b.c_str(), &p.p));
            print(rm_pcf_fr(p.p, max_depth, &res.r), res);
        } else if (*match) {
            if (from_pcf == !value.empty()) {
                std::cerr << "error: give exactly one of --value and --from-pcf\n";
                return 2;
            }
            if (from_pcf) {
                if (a.empty() || b.empty()) {
                    std::cerr << "error: --from-pcf needs --a and --b\n";
                    return 2;
                }
                Pcf p;
                check(rm_pcf_new(a.c_str(), b.c_str(), &p.p));
                print(rm_match_pcf(p.p, depth, constants.c_str(), margin, products, &res.r), res);
            } else {
                print(rm_match_value(value.c_str(), constants.c_str(), margin, products, &res.r), res);
            }
        } else if (*family) {
            Pcf p;
            check(rm_family(kind.c_str(), params.c_str(), &p.p));
            print(rm_pcf_json(p.p, &res.r), res);
        } else if (*constant) {
            print(rm_constant(cname.c_str(), digits, verify, &res.r), res);
        } else if (*verify_cmd) {
            Field f;
            load_field(f, field, "");
            print(rm_field_verify(f.f, grid, &res.r), res);
        } else if (*limit) {
            Field f;
            load_field(f, field, "");
            print(rm_field_limit(f.f, start.c_str(), dir.c_str(), steps, digits, &res.r), res);
        } else if (*topcf) {
            Field f;
            load_field(f, field, "");
            print(rm_field_topcf(f.f, dir.c_str(), &res.r), res);
        } else if (*construct) {
            Field f;
            check(rm_field_construct(degree, cpar.c_str(), fam.c_str(), &f.f));
            print(rm_field_json(f.f, &res.r), res);
        } else if (*cob) {
            Field f, g;
            load_field(f, field, "");
            check(rm_field_coboundary(f.f, u.c_str(), &g.f));
            print(rm_field_json(g.f, &res.r), res);
        } else if (*shift_cmd) {
            Field f;
            load_field(f, field, shift);
            print(rm_field_json(f.f, &res.r), res);
        } else if (*dmap) {
            Field f;
            load_field(f, field, shift);
            rm_status s = rm_delta_map(f.f, xmax, ymax, target.c_str(), &res.r);
            check(s);
            if (out_path.empty()) {
                std::cout << rm_result_text(res.r);
            } else {
                std::ofstream o(out_path);
                o << rm_result_text(res.r);
                if (!o) {
                    std::cerr << "error: cannot write " << out_path << "\n";
                    return 3;
                }
            }
        } else if (*closed) {
            Field f;
            load_field(f, field, shift);
            print(rm_delta_closed(f.f, dir.c_str(), steps, &res.r), res);
        } else if (*emp) {
            Field f;
            load_field(f, field, shift);
            print(rm_delta_empirical(f.f, dir.c_str(), target.c_str(), steps, &res.r), res);
        } else if (*opt) {
            Field f;
            load_field(f, field, shift);
            print(rm_delta_optimize(f.f, method.c_str(), horizon, target.c_str(), steps, &res.r), res);
        } else if (*combine) {
            print(rm_zeta5_combine(rvals.c_str(), zdepth, mode.c_str(), &res.r), res);
        } else if (*serve) {
            nlohmann::json cfg{{"host", host}, {"port", port}, {"chunk_size", chunk_size}, {"store", store}};
            if (lease > 0) cfg["lease_seconds"] = lease;
            cfg["constants"] = nlohmann::json::array();
            std::stringstream cs(constants);
            for (std::string c; std::getline(cs, c, ',');)
                if (!c.empty()) cfg["constants"].push_back(c);
            for (const auto& sc : schemes) {
                try {
                    cfg["schemes"].push_back(nlohmann::json::parse(read_scheme(sc)));
                } catch (const nlohmann::json::exception& e) {
                    throw CLI::ValidationError("--scheme", e.what());
                }
            }
            rm_coordinator* c = nullptr;
            check(rm_coordinator_start(cfg.dump().c_str(), &c));
            std::cerr << "listening on " << host << ":" << rm_coordinator_port(c) << "\n";
            rm_status s = rm_coordinator_wait(c, timeout);
            rm_coordinator_status(c, &res.r);
            rm_coordinator_stop(c);
            print(s, res);
        } else if (*work) {
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            print(rm_worker_run(server.empty() ? nullptr : server.c_str(), parallelism,
                                options.empty() ? nullptr : options.c_str(), &res.r),
                  res);
        }
    } catch (const Failure& f) {
        return exit_code(f.status);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
