#pragma once

#include <string>
#include <vector>

namespace rm_test {

struct PcfFixture {
    const char* label;
    const char* a;
    const char* b;
};

// Historical formulas; every one of them is expected to show factorial reduction.
inline const std::vector<PcfFixture>& fr_corpus() {
    static const std::vector<PcfFixture> v = {
        {"apery", "34*n^3+51*n^2+27*n+5", "-n^6"},
        {"zeta2 alpha=5", "n^2+(n+1)^2+20", "-n^4"},
        {"lerch 7/3", "9*(n^3+(n+1)^3)+56*(2*n+1)", "-81*n^6"},
        {"zeta3-zeta2+1", "n^3+(n+1)^3+(n+1)^2", "-n^5*(n+1)"},
        {"zeta7-4zeta3+4", "n^7+(n+1)^7+8*(n^5+(n+1)^5)-8*(n^3+(n+1)^3)+4*(2*n+1)", "-n^14"},
        {"t1r1", "n^5+(n+1)^5+6*(n^3+(n+1)^3)", "-n^10"},
        {"t1r2", "n^5+(n+1)^5+6*(n^3+(n+1)^3)-4*(2*n+1)", "-n^10"},
        {"t1r3", "n^5+(n+1)^5+16*(n^3+(n+1)^3)-4*(2*n+1)", "-n^10"},
        {"t1r4", "8*(n^5+(n+1)^5)-15*(n^3+(n+1)^3)+9*(2*n+1)", "-64*n^10"},
        {"t1r5", "8*(n^5+(n+1)^5)-12*(n^3+(n+1)^3)+7*(2*n+1)", "-64*n^10"},
        {"t1r6", "8*(n^5+(n+1)^5)+20*(n^3+(n+1)^3)-5*(2*n+1)", "-64*n^10"},
        {"t2 zhat R=1", "n^5+(n+1)^4*(n+2)", "-n^9*(n+1)"},
        {"t2 zhat R=2", "n^5+(n+1)^4*(n+3)", "-n^9*(n+2)"},
        {"t2 zhat R=3", "n^5+(n+1)^4*(n+4)", "-n^9*(n+3)"},
        {"t2 g a=1", "n^4*(n+1)+(n+1)^5", "-n^9*(n+1)"},
        {"t2 g a=2", "n^4*(n+2)+(n+1)^5", "-n^9*(n+2)"},
        {"t2 g a=3", "n^4*(n+3)+(n+1)^5", "-n^9*(n+3)"},
        {"t2 t r1", "n^4*(n+1)+(n+1)^4*(n+2)", "-n^4*(n+1)*n^4*(n+1)"},
        {"t2 t r2", "n^4*(n+1)+(n+1)^4*(n+3)", "-n^4*(n+1)*n^4*(n+2)"},
        {"t2 t r3", "n^4*(n+2)+(n+1)^4*(n+4)", "-n^4*(n+2)*n^4*(n+3)"},
        {"t2 C=2", "2*n^5+(n+1)^4*(2*n+3)", "-2*n^9*(2*n+1)"},
        {"t2 C=3", "3*n^5+(n+1)^4*(3*n+4)", "-3*n^9*(3*n+1)"},
        {"t2 C=4", "4*n^5+(n+1)^4*(4*n+5)", "-4*n^9*(4*n+1)"},
        {"t3 a=1", "n^2+(n+1)^2", "-n^4"},
        {"t3 a=2", "n^2+(n+1)^2+2", "-n^4"},
        {"t3 a=3", "n^2+(n+1)^2+6", "-n^4"},
        {"t3 a=4", "n^2+(n+1)^2+12", "-n^4"},
        {"t4r1", "n^4+(n+1)^4+2*(n^2+(n+1)^2)", "-n^8"},
    };
    return v;
}

}  // namespace rm_test
