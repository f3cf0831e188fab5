#ifndef GRAPHOPT_VALUE_HPP
#define GRAPHOPT_VALUE_HPP

#include <cstdint>
#include <cstdio>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

namespace graphopt {

struct value_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/* Invalid or unreadable configuration: generator parameters, cost models,
 * benchmark options. */
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/* Calendar date, day precision. Comparison is field-wise; no timezone logic
 * anywhere. */
struct Date {
  int year = 1970;
  unsigned month = 1;  // 1..12
  unsigned day = 1;    // 1..31

  friend constexpr bool operator==(const Date&, const Date&) = default;
  friend constexpr auto operator<=>(const Date&, const Date&) = default;
};

constexpr bool is_leap_year(int y) {
  return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

constexpr unsigned days_in_month(int year, unsigned month) {
  constexpr unsigned lengths[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month == 2 && is_leap_year(year)) return 29;
  return lengths[month - 1];
}

constexpr bool valid_date(const Date& d) {
  return d.month >= 1 && d.month <= 12 && d.day >= 1 &&
         d.day <= days_in_month(d.year, d.month);
}

/* Days since 1970-01-01, negative before. Standard civil-calendar conversion;
 * used for uniform date draws and date arithmetic in the generator. */
constexpr std::int64_t days_from_civil(const Date& d) {
  std::int64_t y = d.year;
  y -= d.month <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (d.month + (d.month > 2 ? -3 : 9)) + 2) / 5 + d.day - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

constexpr Date civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  return Date{static_cast<int>(y + (m <= 2)), m, d};
}

inline std::string format_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", d.year, d.month, d.day);
  return buf;
}

/* Strict "YYYY-MM-DD"; rejects out-of-range fields. */
inline std::optional<Date> parse_date(const std::string& s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
    if (s[i] < '0' || s[i] > '9') return std::nullopt;
  Date d;
  d.year = std::stoi(s.substr(0, 4));
  d.month = static_cast<unsigned>(std::stoi(s.substr(5, 2)));
  d.day = static_cast<unsigned>(std::stoi(s.substr(8, 2)));
  if (!valid_date(d)) return std::nullopt;
  return d;
}

/* Property values are one of four variants. Equality across variants is
 * false, never a coercion: 1 != 1.0 != "1". Ordering exists only for
 * canonical sorting (variant rank, then value) and is total. */
using PropertyValue = std::variant<std::string, std::int64_t, double, Date>;

inline const char* variant_name(const PropertyValue& v) {
  switch (v.index()) {
    case 0: return "text";
    case 1: return "integer";
    case 2: return "float";
    default: return "date";
  }
}

inline bool value_equal(const PropertyValue& a, const PropertyValue& b) {
  return a == b;  // variant equality: cross-variant is already false
}

/* Total order: variant rank first, then natural value order. Floats use
 * full ordering with -0.0 == 0.0; NaN never enters a graph (parser and
 * loader reject it). */
inline int value_compare(const PropertyValue& a, const PropertyValue& b) {
  if (a.index() != b.index()) return a.index() < b.index() ? -1 : 1;
  int out = 0;
  std::visit(
      [&](const auto& x) {
        const auto& y = std::get<std::decay_t<decltype(x)>>(b);
        if (x < y) out = -1;
        else if (y < x) out = 1;
      },
      a);
  return out;
}

/* Canonical text form, used for index keys, checksums, and table printing.
 * Normalizes -0.0 so index lookups agree with variant equality. */
inline std::string value_repr(const PropertyValue& v) {
  switch (v.index()) {
    case 0: return "t:" + std::get<std::string>(v);
    case 1: return "i:" + std::to_string(std::get<std::int64_t>(v));
    case 2: {
      double f = std::get<double>(v);
      if (f == 0.0) f = 0.0;  // collapse -0.0
      char buf[40];
      std::snprintf(buf, sizeof buf, "f:%.17g", f);
      return buf;
    }
    default: return "d:" + format_date(std::get<Date>(v));
  }
}

/* Human-facing form (no variant tag), used when printing result tables. */
inline std::string value_display(const PropertyValue& v) {
  switch (v.index()) {
    case 0: return "\"" + std::get<std::string>(v) + "\"";
    case 1: return std::to_string(std::get<std::int64_t>(v));
    case 2: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%g", std::get<double>(v));
      return buf;
    }
    default: return format_date(std::get<Date>(v));
  }
}

}  // namespace graphopt

#endif
