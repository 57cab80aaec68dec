#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "ergoseq/error.hpp"
#include "ergoseq/io.hpp"

using namespace ergoseq;

TEST_CASE("sequence spec parsing") {
    CHECK(parse_sequence_spec("1,2.5,-3") == TruncatedSequence({1.0, 2.5, -3.0}));
    CHECK(parse_sequence_spec("1@const:0.5") == TruncatedSequence({1.0}, Tail::constant(0.5)));
    CHECK(parse_sequence_spec("@bounded:0.25").tail() == Tail::bounded(0.25));
    CHECK(parse_sequence_spec(" 4 , 5 @zero") == TruncatedSequence({4.0, 5.0}));
    CHECK_THROWS(parse_sequence_spec("1,x"));
    CHECK_THROWS(parse_sequence_spec("1@tail"));
}

TEST_CASE("operator spec parsing") {
    CHECK(parse_operator_spec("shift:left").form_name() == "shift_left");
    CHECK(parse_operator_spec("shift:right").form_name() == "shift_right");
    CHECK(parse_operator_spec("identity:3").matrix() == SparseMatrix::identity(3));
    CHECK(apply(parse_operator_spec("perm:2,1"), TruncatedSequence({1, 0})) == TruncatedSequence({0, 1}));
    CHECK_THROWS(parse_operator_spec("rotate:1"));
    CHECK_THROWS(parse_operator_spec("file:/nonexistent/op.json"));
}

TEST_CASE("sequence JSON round trip") {
    for (const auto& x : {TruncatedSequence({0.1, -1e-300, 3.0}), TruncatedSequence({}, Tail::constant(-2.0)),
                          TruncatedSequence({1.0 / 3}, Tail::bounded(0.125))}) {
        CHECK(sequence_from_json(Json::parse(to_json(x).dump())) == x);
    }
}

TEST_CASE("operator JSON round trip") {
    const std::size_t map[] = {2, 3, 1};
    const auto perm = DsOperator::permutation(map);
    const auto m = random_ds(7, 0.5, SignMode::Signed, 99);
    const auto cc = DsOperator::convex_combination({0.25, 0.75}, {DsOperator::identity(3), perm});
    for (const auto& op : {m, perm, DsOperator::shift(ShiftDirection::Left), cc, DsOperator::power(perm, 4),
                           DsOperator::compose({perm, DsOperator::shift(ShiftDirection::Right)})}) {
        const auto j = to_json(op);
        const auto back = operator_from_json(Json::parse(j.dump()));
        CHECK(to_json(back) == j);
    }
    // Bit-exact for matrices.
    CHECK(operator_from_json(Json::parse(to_json(m).dump()), 0.0).matrix() == m.matrix());
}

TEST_CASE("operator JSON validation") {
    CHECK_THROWS_AS(operator_from_json(Json::parse(R"({"form":"matrix","dim":2,"entries":[[0,1,0.5]]})")),
                    InvalidOperator);
    CHECK_THROWS_AS(operator_from_json(Json::parse(R"({"form":"matrix","dim":2,"entries":[[1,1,1.6]]})")),
                    NotContraction);
    CHECK_THROWS_AS(operator_from_json(Json::parse(R"({"form":"spiral"})")), InvalidOperator);
}

TEST_CASE("load_operator from file") {
    const std::string path = "test_io_operator.json";
    {
        std::ofstream out(path);
        out << R"({"form":"matrix","dim":2,"entries":[[1,1,0.5],[1,2,0.5],[2,1,0.5],[2,2,0.5]]})";
    }
    const auto op = load_operator(path, 0.0);
    CHECK(op.certificate().row_norm == 1.0);
    CHECK(parse_operator_spec("file:" + path).matrix() == op.matrix());
    {
        std::ofstream out(path);
        out << "{not json";
    }
    CHECK_THROWS_AS(load_operator(path, 0.0), Error);
    std::remove(path.c_str());
}

TEST_CASE("space JSON round trip") {
    for (const auto& s : {SpaceDescriptor::lp(3.0), SpaceDescriptor::c0(), SpaceDescriptor::linf()}) {
        CHECK(space_from_json(to_json(s)) == s);
    }
}
