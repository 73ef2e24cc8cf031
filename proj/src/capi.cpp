#include <cstdlib>
#include <regex>
#include <sstream>
#include <string>

#include "json.hpp"
#include "rm/constants.hpp"
#include "rm/delta.hpp"
#include "rm/error.hpp"
#include "rm/field.hpp"
#include "rm/fr.hpp"
#include "rm/pcf.hpp"
#include "rm/relation.hpp"
#include "rm/rm.h"
#include "rm/search.hpp"

struct rm_result {
    std::string text;
};
struct rm_pcf {
    rm::Pcf pcf;
};
struct rm_field {
    rm::MatrixField field;
    std::string construction;  // JSON report when built by rm_field_construct
};
struct rm_coordinator {
    std::unique_ptr<rm::Coordinator> c;
};

namespace {

thread_local std::string g_last_error;

template <class F>
rm_status guard(F&& f) {
    try {
        g_last_error.clear();
        return f();
    } catch (const rm::Error& e) {
        g_last_error = e.what();
        return e.code();
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return RM_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return RM_ERR_INTERNAL;
    }
}

rm_status emit(rm_result** out, std::string text) {
    if (!out) throw rm::Error(RM_ERR_INVALID_ARGUMENT, "null output pointer");
    *out = new rm_result{std::move(text)};
    return RM_OK;
}

void need(const void* p, const char* what) {
    if (!p) throw rm::Error(RM_ERR_INVALID_ARGUMENT, std::string(what) + " must not be null");
}

std::string str_or(const char* s, const std::string& fallback) { return s && *s ? std::string(s) : fallback; }

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');) {
        auto b = item.find_first_not_of(" \t"), e = item.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

rm::Trajectory trajectory(const rm::MatrixField& f, const char* start, const char* dir) {
    size_t d = f.dimension();
    std::string ones;
    for (size_t i = 0; i < d; ++i) {
        ones += i ? ",1" : "1";
    }
    return rm::parse_trajectory(str_or(start, ones), str_or(dir, ones), d);
}

// Digits carried by a decimal literal.
long literal_digits(const std::string& v) {
    static const std::regex re(R"(^\s*[+-]?(\d+)(\.(\d*))?\s*$)");
    std::smatch m;
    if (!std::regex_match(v, m, re)) throw rm::Error(RM_ERR_SYNTAX, "value must be a decimal literal: " + v);
    std::string digits = m[1].str() + m[3].str();
    auto nz = digits.find_first_not_of('0');
    return nz == std::string::npos ? 1 : long(digits.size() - nz);
}

}  // namespace

extern "C" {

const char* rm_status_string(rm_status status) { return rm::status_name(status); }
const char* rm_last_error(void) { return g_last_error.c_str(); }

const char* rm_result_text(const rm_result* result) { return result ? result->text.c_str() : ""; }
void rm_result_free(rm_result* result) { delete result; }

rm_status rm_pcf_new(const char* a, const char* b, rm_pcf** out) {
    return guard([&] {
        need(a, "a");
        need(b, "b");
        need(out, "out");
        *out = new rm_pcf{rm::Pcf::parse(a, b)};
        return RM_OK;
    });
}

void rm_pcf_free(rm_pcf* pcf) { delete pcf; }

rm_status rm_pcf_eval(const rm_pcf* pcf, long depth, long digits, const char* accel, rm_result** out) {
    return guard([&] {
        need(pcf, "pcf");
        rm::LimitOptions opt;
        std::string a = str_or(accel, "auto");
        if (a == "none") opt.accel = rm::Accel::None;
        else if (a == "richardson") opt.accel = rm::Accel::Richardson;
        else if (a == "auto") opt.accel = rm::Accel::Auto;
        else throw rm::Error(RM_ERR_INVALID_ARGUMENT, "accel must be none, richardson or auto");
        auto r = rm::pcf_limit(pcf->pcf, depth, digits, opt);
        return emit(out, rm::precision_report_json(r, digits));
    });
}

rm_status rm_pcf_fr(const rm_pcf* pcf, long max_depth, rm_result** out) {
    return guard([&] {
        need(pcf, "pcf");
        return emit(out, rm::growth_json(rm::classify_fr(pcf->pcf, max_depth)));
    });
}

rm_status rm_family(const char* kind, const char* params_json, rm_pcf** out) {
    return guard([&] {
        need(kind, "kind");
        need(out, "out");
        *out = new rm_pcf{rm::make_family_pcf(kind, str_or(params_json, "{}"))};
        return RM_OK;
    });
}

rm_status rm_pcf_json(const rm_pcf* pcf, rm_result** out) {
    return guard([&] {
        need(pcf, "pcf");
        return emit(out, pcf->pcf.json());
    });
}

rm_status rm_constant(const char* name, long digits, int verify, rm_result** out) {
    return guard([&] {
        need(name, "name");
        nlohmann::json j;
        j["name"] = name;
        j["digits"] = digits;
        j["value"] = rm::get_constant(name, digits).to_string(digits);
        j["primary"] = rm::primary_series(name);
        j["check"] = rm::check_series(name);
        if (verify) j["verified_digits"] = rm::verify_constant(name, digits);
        return emit(out, j.dump());
    });
}

rm_status rm_match_value(const char* value, const char* constants, int margin, int products, rm_result** out) {
    return guard([&] {
        need(value, "value");
        need(constants, "constants");
        long k = literal_digits(value);
        rm::HPDecimal v(k, std::string(value));
        auto names = split_list(constants);
        if (names.empty()) throw rm::Error(RM_ERR_INVALID_ARGUMENT, "at least one constant is required");
        long m = margin > 0 ? margin : 10;
        rm::Match r = names.size() == 1 && !products ? rm::mobius_match(v, names[0], 20, m)
                                                     : rm::extended_match(v, names, products != 0, 20, m);
        return emit(out, r.json());
    });
}

rm_status rm_match_pcf(const rm_pcf* pcf, long depth, const char* constants, int margin, int products,
                       rm_result** out) {
    return guard([&] {
        need(pcf, "pcf");
        need(constants, "constants");
        auto names = split_list(constants);
        if (names.empty()) throw rm::Error(RM_ERR_INVALID_ARGUMENT, "at least one constant is required");
        rm::Match r = rm::match_pcf(pcf->pcf, depth, names, products != 0, margin > 0 ? margin : 10);
        return emit(out, r.json());
    });
}

rm_status rm_field_load(const char* spec, rm_field** out) {
    return guard([&] {
        need(spec, "spec");
        need(out, "out");
        *out = new rm_field{rm::load_field(spec), ""};
        return RM_OK;
    });
}

void rm_field_free(rm_field* field) { delete field; }

rm_status rm_field_json(const rm_field* field, rm_result** out) {
    return guard([&] {
        need(field, "field");
        if (field->construction.empty()) return emit(out, field->field.json());
        auto j = nlohmann::json::parse(field->field.json());
        j["construction"] = nlohmann::json::parse(field->construction);
        return emit(out, j.dump());
    });
}

rm_status rm_field_construct(int degree, const char* c, const char* family, rm_field** out) {
    return guard([&] {
        need(c, "c");
        need(out, "out");
        rm::ConstructionParams p;
        p.degree = degree;
        p.family = str_or(family, "");
        for (const auto& v : split_list(c)) {
            rm::BigRational r;
            try {
                r = rm::BigRational(v);
            } catch (...) {
                throw rm::Error(RM_ERR_SYNTAX, "bad parameter '" + v + "'");
            }
            r.canonicalize();
            p.c.push_back(r);
        }
        rm::Construction k = rm::construct(p);
        *out = new rm_field{k.field, k.json()};
        return RM_OK;
    });
}

rm_status rm_field_shift(const rm_field* field, const char* shifts, rm_field** out) {
    return guard([&] {
        need(field, "field");
        need(shifts, "shifts");
        need(out, "out");
        std::vector<rm::BigRational> s;
        for (const auto& v : split_list(shifts)) {
            rm::BigRational r;
            try {
                r = rm::BigRational(v);
            } catch (...) {
                throw rm::Error(RM_ERR_SYNTAX, "bad shift '" + v + "'");
            }
            r.canonicalize();
            s.push_back(r);
        }
        *out = new rm_field{rm::shift_field(field->field, s), ""};
        return RM_OK;
    });
}

rm_status rm_field_coboundary(const rm_field* field, const char* u, rm_field** out) {
    return guard([&] {
        need(field, "field");
        need(u, "u");
        need(out, "out");
        rm::PolyMat U = rm::parse_poly_mat(u, field->field.vars);
        *out = new rm_field{rm::coboundary(field->field, U), ""};
        return RM_OK;
    });
}

rm_status rm_field_verify(const rm_field* field, int grid, rm_result** out) {
    return guard([&] {
        need(field, "field");
        auto r = rm::cocycle_check(field->field, grid);
        rm_status st = emit(out, r.json());
        return r.pass ? st : RM_NO_RESULT;
    });
}

rm_status rm_field_limit(const rm_field* field, const char* start, const char* dir, long steps, long digits,
                         rm_result** out) {
    return guard([&] {
        need(field, "field");
        auto r = rm::traj_limit(field->field, trajectory(field->field, start, dir), steps, digits);
        return emit(out, rm::precision_report_json(r, digits));
    });
}

rm_status rm_field_topcf(const rm_field* field, const char* dir, rm_result** out) {
    return guard([&] {
        need(field, "field");
        return emit(out, rm::cmf_to_pcf(field->field, trajectory(field->field, nullptr, dir)).json());
    });
}

rm_status rm_delta_map(const rm_field* field, int xmax, int ymax, const char* constant, rm_result** csv_out) {
    return guard([&] {
        need(field, "field");
        auto L = rm::field_target(field->field, rm::diagonal(field->field.dimension()), str_or(constant, "limit"));
        return emit(csv_out, rm::delta_map_csv(rm::delta_map(field->field, xmax, ymax, L)));
    });
}

rm_status rm_delta_closed(const rm_field* field, const char* dir, long steps, rm_result** out) {
    return guard([&] {
        need(field, "field");
        auto r = rm::delta_closed_form(field->field, trajectory(field->field, nullptr, dir), steps > 0 ? steps : 1500);
        return emit(out, r.json());
    });
}

rm_status rm_delta_empirical(const rm_field* field, const char* dir, const char* constant, long steps,
                             rm_result** out) {
    return guard([&] {
        need(field, "field");
        auto traj = trajectory(field->field, nullptr, dir);
        auto L = rm::field_target(field->field, traj, str_or(constant, "limit"));
        return emit(out, rm::delta_empirical(field->field, traj, L, steps > 0 ? steps : 1500).json());
    });
}

rm_status rm_delta_optimize(const rm_field* field, const char* method, int horizon, const char* constant, long steps,
                            rm_result** out) {
    return guard([&] {
        need(field, "field");
        std::string m = str_or(method, "lls");
        auto L = rm::field_target(field->field, rm::diagonal(field->field.dimension()), str_or(constant, "limit"));
        long tail = steps > 0 ? steps : 600;
        if (m == "greedy") return emit(out, rm::optimize_greedy(field->field, L, horizon, tail).json());
        if (m == "lls") return emit(out, rm::optimize_lls(field->field, L, horizon, tail).json());
        throw rm::Error(RM_ERR_INVALID_ARGUMENT, "method must be greedy or lls");
    });
}

rm_status rm_zeta5_combine(const char* r, long depth, const char* mode, rm_result** out) {
    return guard([&] {
        auto vals = split_list(str_or(r, "1,1,1,1"));
        if (vals.size() != 4) throw rm::Error(RM_ERR_ARITY, "r needs four values for s=2..5");
        std::map<int, long> R;
        for (int s = 2; s <= 5; ++s) {
            char* end = nullptr;
            long v = std::strtol(vals[size_t(s - 2)].c_str(), &end, 10);
            if (!end || *end) throw rm::Error(RM_ERR_SYNTAX, "bad R value '" + vals[size_t(s - 2)] + "'");
            R[s] = v;
        }
        return emit(out, rm::zeta_combination(5, R, depth > 0 ? depth : 80, str_or(mode, "search")).json());
    });
}

rm_status rm_coordinator_start(const char* config_json, rm_coordinator** out) {
    return guard([&] {
        need(config_json, "config");
        need(out, "out");
        auto c = std::make_unique<rm::Coordinator>(rm::CoordinatorConfig::from_json(config_json));
        c->start();
        *out = new rm_coordinator{std::move(c)};
        return RM_OK;
    });
}

int rm_coordinator_port(const rm_coordinator* c) { return c ? c->c->port() : -1; }

rm_status rm_coordinator_wait(rm_coordinator* c, double timeout_seconds) {
    return guard([&] {
        need(c, "coordinator");
        if (c->c->wait(timeout_seconds)) return RM_OK;
        g_last_error = "timed out before the search drained";
        return RM_NO_RESULT;
    });
}

rm_status rm_coordinator_status(const rm_coordinator* c, rm_result** out) {
    return guard([&] {
        need(c, "coordinator");
        return emit(out, c->c->status_json());
    });
}

void rm_coordinator_stop(rm_coordinator* c) {
    if (!c) return;
    c->c->stop();
    delete c;
}

rm_status rm_worker_run(const char* server, int parallelism, const char* options_json, rm_result** out) {
    return guard([&] {
        const char* env_addr = std::getenv("RM_SERVER_ADDR");
        std::string addr = str_or(server, env_addr ? env_addr : "");
        if (addr.empty()) throw rm::Error(RM_ERR_INVALID_ARGUMENT, "no server address (set RM_SERVER_ADDR)");
        rm::WorkerOptions o = rm::WorkerOptions::from_json(str_or(options_json, ""));
        if (parallelism > 0) {
            o.parallelism = parallelism;
        } else if (const char* env = std::getenv("RM_WORKER_PARALLELISM")) {
            o.parallelism = std::max(1, std::atoi(env));
        }
        return emit(out, rm::worker_run(addr, o).json());
    });
}

void rm_worker_request_stop(void) { rm::worker_request_stop(true); }

}  // extern "C"
