#include "doctest.h"

#include "properties.hpp"

TEST_CASE("property suites") {
    for (const auto& r : rm_test::all_properties(100)) {
        CAPTURE(r.name);
        CAPTURE(r.first_failure);
        CHECK(r.cases == 100);
        CHECK(r.failures == 0);
    }
}

TEST_CASE("properties hold under other seeds") {
    CHECK(rm_test::prop_determinant_identity(50, 11).failures == 0);
    CHECK(rm_test::prop_parser_roundtrip(50, 12).failures == 0);
    CHECK(rm_test::prop_path_invariance(50, 13).failures == 0);
}
