#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "exdist/ingest.hpp"
#include "exdist/rca.hpp"

namespace exdist::io {

/// 12 significant digits, the format used by every emitted table.
std::string format_number(double v);

/// Canonical intermediate matrix format: '#' metadata lines (year), then a
/// header row "country,<product codes...>" and one row per country.
void write_matrix(std::ostream& out, const TradeMatrix& m, char delimiter = ',');
TradeMatrix read_matrix(std::istream& in, char delimiter = ',');

/// Country-rows x product-columns dump of an arbitrary real matrix.
void write_named_matrix(std::ostream& out, const std::vector<std::string>& countries,
                        const std::vector<std::string>& products, const DenseMatrix& values,
                        char delimiter = ',');

void write_binary_matrix(std::ostream& out, const BinaryExportMatrix& m, char delimiter = ',');

/// Long-format record rows (year,country,product,volume) for the positive
/// cells; the same shape parse_records consumes.
void write_records(std::ostream& out, const TradeMatrix& m, char delimiter = ',');

void write_reject_report(std::ostream& out, const std::vector<RejectedRow>& rejects);

}  // namespace exdist::io
