#include "ergoseq/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "ergoseq/error.hpp"

namespace ergoseq {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

double parse_double(std::string_view s) {
    s = trim(s);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw Error("not a number: '" + std::string(s) + "'");
    return v;
}

std::size_t parse_size(std::string_view s) {
    s = trim(s);
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw Error("not a nonnegative integer: '" + std::string(s) + "'");
    return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    while (true) {
        const auto pos = s.find(sep);
        out.push_back(s.substr(0, pos));
        if (pos == std::string_view::npos) break;
        s.remove_prefix(pos + 1);
    }
    return out;
}

}  // namespace

Json to_json(const TruncatedSequence& x) {
    const Tail& t = x.tail();
    const char* kind = t.kind() == TailKind::Zero ? "zero" : t.kind() == TailKind::Constant ? "constant" : "bounded";
    return Json{{"values", std::vector<double>(x.values().begin(), x.values().end())},
                {"tail_kind", kind},
                {"tail_value", t.value()}};
}

TruncatedSequence sequence_from_json(const Json& j) {
    auto values = j.at("values").get<std::vector<double>>();
    const auto kind = j.value("tail_kind", std::string("zero"));
    const double v = j.value("tail_value", 0.0);
    if (kind == "zero") return TruncatedSequence(std::move(values));
    if (kind == "constant") return TruncatedSequence(std::move(values), Tail::constant(v));
    if (kind == "bounded") return TruncatedSequence(std::move(values), Tail::bounded(v));
    throw Error("unknown tail_kind '" + kind + "'");
}

Json to_json(const DsOperator& op) {
    Json j = std::visit(
        Overloaded{
            [](const MatrixForm& f) {
                Json entries = Json::array();
                for (const auto& e : f.matrix.entries()) entries.push_back(Json::array({e.row + 1, e.col + 1, e.value}));
                return Json{{"form", "matrix"}, {"dim", f.matrix.dim()}, {"entries", std::move(entries)}};
            },
            [&](const ShiftForm&) { return Json{{"form", op.form_name()}}; },
            [](const PermutationForm& f) {
                std::vector<std::size_t> one_based(f.map.size());
                for (std::size_t i = 0; i < f.map.size(); ++i) one_based[i] = f.map[i] + 1;
                return Json{{"form", "permutation"}, {"dim", f.map.size()}, {"map", one_based}};
            },
            [](const ConvexCombinationForm& f) {
                Json parts = Json::array();
                for (const auto& p : f.parts) parts.push_back(to_json(p));
                return Json{{"form", "convex_combination"}, {"weights", f.weights}, {"parts", std::move(parts)}};
            },
            [](const PowerForm& f) {
                return Json{{"form", "power"}, {"exponent", f.exponent}, {"base", to_json(*f.base)}};
            },
            [](const ComposeForm& f) {
                Json parts = Json::array();
                for (const auto& p : f.parts) parts.push_back(to_json(p));
                return Json{{"form", "compose"}, {"parts", std::move(parts)}};
            },
        },
        op.form());
    j["cert"] = Json{{"row_norm", op.certificate().row_norm}, {"col_norm", op.certificate().col_norm}};
    return j;
}

DsOperator operator_from_json(const Json& j, double tolerance) {
    const auto form = j.at("form").get<std::string>();
    if (form == "matrix") {
        const auto dim = j.at("dim").get<std::size_t>();
        std::vector<MatrixEntry> entries;
        for (const auto& e : j.at("entries")) {
            const auto r = e.at(0).get<std::size_t>();
            const auto c = e.at(1).get<std::size_t>();
            if (r == 0 || c == 0) throw InvalidOperator("matrix entry indices are 1-based");
            entries.push_back({r - 1, c - 1, e.at(2).get<double>()});
        }
        return certify_ds(SparseMatrix(dim, std::move(entries)), tolerance);
    }
    if (form == "shift_left") return DsOperator::shift(ShiftDirection::Left);
    if (form == "shift_right") return DsOperator::shift(ShiftDirection::Right);
    if (form == "permutation") {
        const auto map = j.at("map").get<std::vector<std::size_t>>();
        return DsOperator::permutation(map);
    }
    if (form == "convex_combination") {
        std::vector<DsOperator> parts;
        for (const auto& p : j.at("parts")) parts.push_back(operator_from_json(p, tolerance));
        return DsOperator::convex_combination(j.at("weights").get<std::vector<double>>(), std::move(parts));
    }
    if (form == "power") {
        return DsOperator::power(operator_from_json(j.at("base"), tolerance), j.at("exponent").get<std::size_t>());
    }
    if (form == "compose") {
        std::vector<DsOperator> parts;
        for (const auto& p : j.at("parts")) parts.push_back(operator_from_json(p, tolerance));
        return DsOperator::compose(std::move(parts));
    }
    throw InvalidOperator("unknown operator form '" + form + "'");
}

Json to_json(const SpaceDescriptor& space) {
    switch (space.kind()) {
        case SpaceKind::Lp:
            return Json{{"kind", "lp"}, {"p", space.p()}};
        case SpaceKind::C0:
            return Json{{"kind", "c0"}};
        case SpaceKind::Linf:
            return Json{{"kind", "linf"}};
    }
    return {};
}

SpaceDescriptor space_from_json(const Json& j) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "lp") return SpaceDescriptor::lp(j.at("p").get<double>());
    if (kind == "c0") return SpaceDescriptor::c0();
    if (kind == "linf") return SpaceDescriptor::linf();
    throw Error("unknown space kind '" + kind + "'");
}

TruncatedSequence parse_sequence_spec(std::string_view spec) {
    spec = trim(spec);
    std::string_view values_part = spec;
    std::string_view tail_part;
    if (const auto at = spec.find('@'); at != std::string_view::npos) {
        values_part = spec.substr(0, at);
        tail_part = trim(spec.substr(at + 1));
    }

    std::vector<double> values;
    if (!trim(values_part).empty()) {
        for (auto v : split(values_part, ',')) values.push_back(parse_double(v));
    }

    if (tail_part.empty() || tail_part == "zero") return TruncatedSequence(std::move(values));
    if (tail_part.starts_with("const:")) {
        return TruncatedSequence(std::move(values), Tail::constant(parse_double(tail_part.substr(6))));
    }
    if (tail_part.starts_with("bounded:")) {
        return TruncatedSequence(std::move(values), Tail::bounded(parse_double(tail_part.substr(8))));
    }
    throw Error("unknown tail specification '" + std::string(tail_part) + "'");
}

DsOperator load_operator(const std::string& path, double tolerance) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open operator file '" + path + "'");
    Json j;
    try {
        in >> j;
    } catch (const Json::exception& e) {
        throw Error("operator file '" + path + "' is not valid JSON: " + e.what());
    }
    return operator_from_json(j, tolerance);
}

DsOperator parse_operator_spec(std::string_view spec) {
    spec = trim(spec);
    if (spec == "shift:left") return DsOperator::shift(ShiftDirection::Left);
    if (spec == "shift:right") return DsOperator::shift(ShiftDirection::Right);
    if (spec.starts_with("identity:")) return DsOperator::identity(parse_size(spec.substr(9)));
    if (spec.starts_with("perm:")) {
        std::vector<std::size_t> map;
        for (auto v : split(spec.substr(5), ',')) map.push_back(parse_size(v));
        return DsOperator::permutation(map);
    }
    if (spec.starts_with("file:")) return load_operator(std::string(spec.substr(5)), 0.0);
    throw Error("unknown operator specification '" + std::string(spec) + "'");
}

}  // namespace ergoseq
