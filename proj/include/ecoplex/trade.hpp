#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>
#include <vector>

#include "ecoplex/matrix.hpp"

namespace ecoplex {

struct TradeFlowRecord {
    int year = 0;
    std::string country;
    std::string product;
    double value = 0.0;

    friend bool operator==(const TradeFlowRecord&, const TradeFlowRecord&) = default;
};

// Long-format (year, country, product, value) export records. Keys are
// unique and values nonnegative; both are enforced at parse time.
struct TradeFlowTable {
    std::vector<TradeFlowRecord> rows;

    std::vector<int> years() const;

    friend bool operator==(const TradeFlowTable&, const TradeFlowTable&) = default;
};

struct CsvFormat {
    char delimiter = ',';
};

// Parses `year,country,product,value` CSV. Throws FormatError on a bad
// header or unparsable cell (diagnostic names the data row), and
// DuplicateKeyError when a (year, country, product) key repeats.
TradeFlowTable parse_trade_flows(std::istream& in, const CsvFormat& format = {});

void write_trade_flows(std::ostream& out, const TradeFlowTable& table,
                       const CsvFormat& format = {});

// Dense RCA values for one year, rows/columns ordered lexicographically by
// code over the whole table (absent combinations give zero rows/columns).
struct RcaMatrix {
    Eigen::MatrixXd values;
    std::vector<std::string> countries;
    std::vector<std::string> products;
};

// Balassa index: (X_cp / sum_p X_cp) / (sum_c X_cp / sum_cp X_cp).
// Rows or columns with zero totals yield RCA 0. Throws EmptyYearError when
// the year is absent or carries zero total trade.
RcaMatrix compute_rca(const TradeFlowTable& table, int year);

// M_cp = 1 iff RCA_cp >= threshold (ties count as specialized). The result
// is unpruned: zero rows/columns and disconnected components may remain.
SpecializationMatrix binarize(const RcaMatrix& rca, double threshold = 1.0);

}  // namespace ecoplex
