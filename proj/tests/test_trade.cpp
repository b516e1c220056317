#include "doctest.h"

#include <sstream>

#include "ecoplex/errors.hpp"
#include "ecoplex/matrix.hpp"
#include "ecoplex/synthetic.hpp"
#include "ecoplex/trade.hpp"

using namespace ecoplex;

namespace {

TradeFlowTable parse(const std::string& text, char delim = ',') {
    std::istringstream in(text);
    CsvFormat format;
    format.delimiter = delim;
    return parse_trade_flows(in, format);
}

}  // namespace

TEST_CASE("parse accepts well-formed rows") {
    const auto table = parse(
        "year,country,product,value\n"
        "1990,USA,P1,100\n"
        "1990,DEU,P1,50\n"
        "1991,USA,P2,7.5\n");
    REQUIRE(table.rows.size() == 3);
    CHECK(table.rows[0].year == 1990);
    CHECK(table.rows[0].country == "USA");
    CHECK(table.rows[2].value == doctest::Approx(7.5));
    CHECK(table.years() == std::vector<int>{1990, 1991});
}

TEST_CASE("parse honors a configurable delimiter") {
    const auto table = parse("year;country;product;value\n1990;USA;P1;3\n", ';');
    REQUIRE(table.rows.size() == 1);
    CHECK(table.rows[0].value == 3.0);
}

TEST_CASE("parse tolerates CRLF line endings and blank lines") {
    const auto table =
        parse("year,country,product,value\r\n1990,USA,P1,4\r\n\r\n1990,DEU,P2,6\r\n");
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[1].country == "DEU");
    CHECK(table.rows[1].value == 6.0);
}

TEST_CASE("parse rejects malformed header") {
    CHECK_THROWS_AS(parse("anno,country,product,value\n1990,USA,P1,1\n"), FormatError);
    CHECK_THROWS_AS(parse(""), FormatError);
}

TEST_CASE("parse rejects negative value naming the row") {
    try {
        parse("year,country,product,value\n1990,USA,P1,-5\n");
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("row 1") != std::string::npos);
        CHECK(std::string(e.what()).find("-5") != std::string::npos);
    }
}

TEST_CASE("parse rejects non-numeric value with row index") {
    try {
        parse("year,country,product,value\n1990,USA,P1,12\n1990,USA,P2,abc\n");
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }
}

TEST_CASE("parse rejects duplicate keys listing the key") {
    try {
        parse("year,country,product,value\n1990,USA,P1,1\n1990,USA,P1,2\n");
        FAIL("expected DuplicateKeyError");
    } catch (const DuplicateKeyError& e) {
        CHECK(std::string(e.what()).find("1990,USA,P1") != std::string::npos);
    }
}

TEST_CASE("synthetic fixture round-trips through write-then-parse unchanged") {
    const TradeFlowTable table = synthetic_trade_flows(2, 34, 40, 9);
    REQUIRE(table.rows.size() >= 1000);
    std::ostringstream out;
    write_trade_flows(out, table);
    const TradeFlowTable reparsed = parse(out.str());
    CHECK(reparsed == table);
}

TEST_CASE("rca: single cell normalizes to one") {
    TradeFlowTable table;
    table.rows.push_back({1990, "USA", "P1", 7.0});
    const RcaMatrix rca = compute_rca(table, 1990);
    REQUIRE(rca.values.rows() == 1);
    REQUIRE(rca.values.cols() == 1);
    CHECK(rca.values(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("rca: hand-evaluated Balassa values on a diagonal table") {
    TradeFlowTable table;
    table.rows.push_back({1990, "A", "P1", 2.0});
    table.rows.push_back({1990, "B", "P2", 2.0});
    const RcaMatrix rca = compute_rca(table, 1990);
    Eigen::MatrixXd expected(2, 2);
    expected << 2, 0, 0, 2;
    CHECK((rca.values - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("rca: uniform table gives all ones") {
    TradeFlowTable table;
    for (const char* c : {"A", "B", "C"}) {
        for (const char* p : {"P1", "P2"}) table.rows.push_back({1990, c, p, 5.0});
    }
    const RcaMatrix rca = compute_rca(table, 1990);
    CHECK((rca.values.array() - 1.0).abs().maxCoeff() < 1e-14);
}

TEST_CASE("rca: absent or zero-trade year") {
    TradeFlowTable table;
    table.rows.push_back({1990, "A", "P1", 1.0});
    table.rows.push_back({1991, "A", "P1", 0.0});
    CHECK_THROWS_AS(compute_rca(table, 1989), EmptyYearError);
    CHECK_THROWS_AS(compute_rca(table, 1991), EmptyYearError);
}

TEST_CASE("rca is invariant to uniform rescaling of export values") {
    TradeFlowTable table = synthetic_trade_flows(1, 12, 18, 21);
    TradeFlowTable scaled = table;
    for (auto& r : scaled.rows) r.value *= 3.7;
    const RcaMatrix a = compute_rca(table, 1990);
    const RcaMatrix b = compute_rca(scaled, 1990);
    CHECK((a.values - b.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("binarize thresholds with >= convention") {
    RcaMatrix rca;
    rca.countries = {"A", "B"};
    rca.products = {"P1", "P2"};
    rca.values.resize(2, 2);

    SUBCASE("clear separation") {
        rca.values << 2, 0, 0, 2;
        const SpecializationMatrix m = binarize(rca, 1.0);
        CHECK(m.has_edge(0, 0));
        CHECK(!m.has_edge(0, 1));
        CHECK(m.edge_count() == 2);
    }
    SUBCASE("value exactly at the threshold counts as specialized") {
        rca.values << 1.0, 0.5, 0.5, 1.0;
        const SpecializationMatrix m = binarize(rca, 1.0);
        CHECK(m.has_edge(0, 0));
        CHECK(m.has_edge(1, 1));
        CHECK(m.edge_count() == 2);
    }
    SUBCASE("all below threshold yields the all-zero matrix") {
        rca.values << 0.2, 0.3, 0.1, 0.4;
        const SpecializationMatrix m = binarize(rca, 1.0);
        CHECK(m.edge_count() == 0);
        CHECK_THROWS_AS(prune(m), PruneError);  // caught downstream
    }
    SUBCASE("non-positive threshold is rejected") {
        rca.values << 1, 1, 1, 1;
        CHECK_THROWS_AS(binarize(rca, 0.0), ContractViolation);
    }
}
