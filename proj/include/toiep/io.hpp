#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "toiep/hermitian.hpp"
#include "toiep/rankone.hpp"
#include "toiep/real.hpp"

namespace toiep {

using Json = nlohmann::json;

Json to_json(const HermitianToeplitz& t);
Json to_json(const SymmetricToeplitz& t);
Json to_json(const HermitianMatrix& m);  // row-major re/im
Json to_json(const SolveReport& r);      // phases in degrees
Json to_json(const RankOneResult& r);
Json to_json(const SearchTrace& t);
Json to_json(const MembershipResult& m);

HermitianToeplitz toeplitz_from_json(const Json& j);
HermitianMatrix matrix_from_json(const Json& j);

// 15 significant digits
std::string format_number(double x);

// One value per line.
void write_values_csv(std::ostream& os, const RVector& v);
void write_trace_csv(std::ostream& os, const SearchTrace& t);

}  // namespace toiep
