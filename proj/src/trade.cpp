#include "ecoplex/trade.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <tuple>

#include "ecoplex/csv.hpp"
#include "ecoplex/errors.hpp"

namespace ecoplex {

namespace {

bool parse_int(const std::string& s, int* out) {
    const char* b = s.data();
    const char* e = b + s.size();
    auto [ptr, ec] = std::from_chars(b, e, *out);
    return ec == std::errc() && ptr == e;
}

bool parse_double(const std::string& s, double* out) {
    const char* b = s.data();
    const char* e = b + s.size();
    auto [ptr, ec] = std::from_chars(b, e, *out);
    return ec == std::errc() && ptr == e && std::isfinite(*out);
}

std::vector<std::string> sorted_unique(std::set<std::string>&& s) {
    return {s.begin(), s.end()};
}

}  // namespace

std::vector<int> TradeFlowTable::years() const {
    std::set<int> ys;
    for (const auto& r : rows) ys.insert(r.year);
    return {ys.begin(), ys.end()};
}

TradeFlowTable parse_trade_flows(std::istream& in, const CsvFormat& format) {
    std::string line;
    if (!std::getline(in, line)) throw FormatError("empty input: missing header");
    {
        auto header = csv::split(csv::trim(line), format.delimiter);
        for (auto& h : header) h = csv::trim(h);
        const std::vector<std::string> expected = {"year", "country", "product", "value"};
        if (header != expected) {
            throw FormatError("malformed header: expected 'year,country,product,value'");
        }
    }

    TradeFlowTable table;
    std::set<std::tuple<int, std::string, std::string>> seen;
    long data_row = 0;
    long file_line = 1;
    while (std::getline(in, line)) {
        ++file_line;
        const std::string trimmed = csv::trim(line);
        if (trimmed.empty()) continue;
        ++data_row;
        const std::string where =
            "row " + std::to_string(data_row) + " (line " + std::to_string(file_line) + ")";

        auto cells = csv::split(trimmed, format.delimiter);
        if (cells.size() != 4) {
            throw FormatError(where + ": expected 4 fields, got " +
                              std::to_string(cells.size()));
        }
        TradeFlowRecord rec;
        if (!parse_int(csv::trim(cells[0]), &rec.year)) {
            throw FormatError(where + ": unparsable year '" + cells[0] + "'");
        }
        rec.country = csv::trim(cells[1]);
        rec.product = csv::trim(cells[2]);
        if (rec.country.empty() || rec.product.empty()) {
            throw FormatError(where + ": empty country or product code");
        }
        const std::string value_cell = csv::trim(cells[3]);
        if (!parse_double(value_cell, &rec.value)) {
            throw FormatError(where + ": unparsable value '" + value_cell + "'");
        }
        if (rec.value < 0.0) {
            throw FormatError(where + ": negative value " + value_cell + " for (" +
                              std::to_string(rec.year) + "," + rec.country + "," +
                              rec.product + ")");
        }
        auto key = std::make_tuple(rec.year, rec.country, rec.product);
        if (!seen.insert(key).second) {
            throw DuplicateKeyError("duplicate key (" + std::to_string(rec.year) + "," +
                                    rec.country + "," + rec.product + ") at " + where);
        }
        table.rows.push_back(std::move(rec));
    }
    return table;
}

void write_trade_flows(std::ostream& out, const TradeFlowTable& table,
                       const CsvFormat& format) {
    const char d = format.delimiter;
    out << "year" << d << "country" << d << "product" << d << "value\n";
    for (const auto& r : table.rows) {
        out << r.year << d << r.country << d << r.product << d << csv::format_number(r.value)
            << "\n";
    }
}

RcaMatrix compute_rca(const TradeFlowTable& table, int year) {
    std::set<std::string> cset, pset;
    bool year_seen = false;
    for (const auto& r : table.rows) {
        cset.insert(r.country);
        pset.insert(r.product);
        year_seen = year_seen || r.year == year;
    }
    if (!year_seen) throw EmptyYearError("year " + std::to_string(year) + " not present");

    RcaMatrix rca;
    rca.countries = sorted_unique(std::move(cset));
    rca.products = sorted_unique(std::move(pset));
    const auto m = static_cast<Eigen::Index>(rca.countries.size());
    const auto n = static_cast<Eigen::Index>(rca.products.size());

    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(m, n);
    for (const auto& r : table.rows) {
        if (r.year != year) continue;
        const auto c = std::lower_bound(rca.countries.begin(), rca.countries.end(), r.country) -
                       rca.countries.begin();
        const auto p = std::lower_bound(rca.products.begin(), rca.products.end(), r.product) -
                       rca.products.begin();
        x(c, p) += r.value;
    }

    const double total = x.sum();
    if (total <= 0.0) {
        throw EmptyYearError("year " + std::to_string(year) + " has zero total trade");
    }
    const Eigen::VectorXd row_tot = x.rowwise().sum();
    const Eigen::VectorXd col_tot = x.colwise().sum();

    rca.values = Eigen::MatrixXd::Zero(m, n);
    for (Eigen::Index c = 0; c < m; ++c) {
        if (row_tot[c] <= 0.0) continue;
        for (Eigen::Index p = 0; p < n; ++p) {
            if (col_tot[p] <= 0.0) continue;
            rca.values(c, p) = (x(c, p) / row_tot[c]) / (col_tot[p] / total);
        }
    }
    return rca;
}

SpecializationMatrix binarize(const RcaMatrix& rca, double threshold) {
    if (!(threshold > 0.0)) throw ContractViolation("binarize threshold must be positive");
    Eigen::MatrixXd binary =
        (rca.values.array() >= threshold).cast<double>().matrix();
    return SpecializationMatrix::from_dense(binary, rca.countries, rca.products);
}

}  // namespace ecoplex
