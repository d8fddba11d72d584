#include "censnv/data.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

namespace censnv {

std::vector<double> censor(std::span<const double> demands, double q_off) {
  if (!(q_off >= 0.0)) {
    throw std::invalid_argument("censor: order quantity must be >= 0");
  }
  std::vector<double> out;
  out.reserve(demands.size());
  for (double d : demands) {
    out.push_back(std::min(d, q_off));
  }
  return out;
}

GeneratedData generate_dataset(const GenerationConfig& cfg) {
  RngStream rng(cfg.seed, 0);
  return generate_dataset(cfg, rng);
}

GeneratedData generate_dataset(const GenerationConfig& cfg, RngStream& rng) {
  if (cfg.num_groups == 0 || cfg.samples_per_group == 0) {
    throw std::invalid_argument("generation: need K >= 1 and N >= 1");
  }
  if (!(cfg.lambda > 0.0) || !std::isfinite(cfg.lambda)) {
    throw std::invalid_argument("generation: lambda must be positive");
  }
  std::vector<SalesGroup> groups;
  std::vector<std::vector<double>> demands;
  for (std::size_t k = 0; k < cfg.num_groups; ++k) {
    double q_off = cfg.lambda;
    if (k > 0) {
      if (cfg.integer_order_quantities) {
        const auto lo = static_cast<std::int64_t>(std::ceil(cfg.lambda / 4.0));
        const auto hi =
            static_cast<std::int64_t>(std::floor(3.0 * cfg.lambda / 4.0));
        if (hi < lo) {
          throw std::invalid_argument(
              "generation: no integer order quantity in [lambda/4, 3 lambda/4]");
        }
        q_off = static_cast<double>(rng.uniform_int(lo, hi));
      } else {
        q_off = cfg.lambda / 4.0 + rng.uniform() * (cfg.lambda / 2.0);
      }
    }
    std::vector<double> d = cfg.distribution.sample(rng, cfg.samples_per_group);
    groups.push_back({q_off, censor(d, q_off)});
    demands.push_back(std::move(d));
  }
  return {CensoredDataset(std::move(groups)), std::move(demands)};
}

namespace {

// One CSV record; handles quoted fields, doubled quotes and CRLF.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields,
                     std::size_t& line_no) {
  fields.clear();
  std::string field;
  bool in_quotes = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') {
          ++line_no;
        }
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      ++line_no;
      break;
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  if (!any) {
    return false;
  }
  fields.push_back(std::move(field));
  return true;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::size_t column_index(const std::vector<std::string>& header,
                         const std::string& name, const std::string& path) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (trim(header[i]) == name) {
      return i;
    }
  }
  throw std::invalid_argument(path + ": missing column '" + name + "'");
}

bool is_weekend(const std::chrono::year_month_day& d) {
  const std::chrono::weekday wd{std::chrono::sys_days{d}};
  return wd == std::chrono::Saturday || wd == std::chrono::Sunday;
}

} // namespace

std::chrono::year_month_day parse_date(const std::string& text,
                                       const std::string& format) {
  int year = -1;
  unsigned month = 0;
  unsigned day = 0;
  std::size_t pos = 0;
  const std::string s = trim(text);
  auto fail = [&]() -> std::chrono::year_month_day {
    throw std::invalid_argument("unparseable date '" + text +
                                "' (format " + format + ")");
  };
  auto read_number = [&](std::size_t max_digits) -> long {
    std::size_t start = pos;
    while (pos < s.size() && pos - start < max_digits &&
           std::isdigit(static_cast<unsigned char>(s[pos])) != 0) {
      ++pos;
    }
    if (pos == start) {
      fail();
    }
    return std::stol(s.substr(start, pos - start));
  };
  for (std::size_t f = 0; f < format.size(); ++f) {
    if (format[f] == '%' && f + 1 < format.size()) {
      const char token = format[++f];
      if (token == 'Y') {
        year = static_cast<int>(read_number(4));
      } else if (token == 'm') {
        month = static_cast<unsigned>(read_number(2));
      } else if (token == 'd') {
        day = static_cast<unsigned>(read_number(2));
      } else {
        throw std::invalid_argument("unsupported date token %" +
                                    std::string(1, token));
      }
    } else {
      if (pos >= s.size() || s[pos] != format[f]) {
        fail();
      }
      ++pos;
    }
  }
  // tolerate a trailing time-of-day component
  if (pos < s.size() && s[pos] != ' ' && s[pos] != 'T') {
    fail();
  }
  const std::chrono::year_month_day ymd{std::chrono::year{year},
                                        std::chrono::month{month},
                                        std::chrono::day{day}};
  if (year < 0 || !ymd.ok()) {
    fail();
  }
  return ymd;
}

std::string format_iso_date(const std::chrono::year_month_day& date) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u",
                static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()),
                static_cast<unsigned>(date.day()));
  return buf;
}

std::vector<SalesRecord> read_sales_csv(const std::string& path,
                                        const SalesCsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open sales file '" + path + "'");
  }
  std::vector<std::string> header;
  std::size_t line_no = 1;
  if (!read_csv_record(in, header, line_no)) {
    throw std::invalid_argument(path + ": empty file");
  }
  if (!header.empty() && header[0].rfind("\xEF\xBB\xBF", 0) == 0) {
    header[0].erase(0, 3);
  }
  const std::size_t date_col = column_index(header, options.date_column, path);
  const std::size_t cat_col =
      column_index(header, options.category_column, path);
  const std::size_t qty_col =
      column_index(header, options.quantity_column, path);
  const std::size_t needed = std::max({date_col, cat_col, qty_col});

  std::vector<SalesRecord> records;
  std::vector<std::string> fields;
  std::size_t record_line = line_no;
  while (read_csv_record(in, fields, line_no)) {
    const std::size_t this_line = record_line;
    record_line = line_no;
    if (fields.size() == 1 && trim(fields[0]).empty()) {
      continue;
    }
    if (fields.size() <= needed) {
      throw std::invalid_argument(path + ":" + std::to_string(this_line) +
                                  ": too few columns");
    }
    SalesRecord r;
    try {
      r.date = parse_date(fields[date_col], options.date_format);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(path + ":" + std::to_string(this_line) +
                                  ": " + e.what());
    }
    r.category = trim(fields[cat_col]);
    const std::string qty = trim(fields[qty_col]);
    std::size_t used = 0;
    try {
      r.quantity = std::stoll(qty, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (qty.empty() || used != qty.size() || r.quantity < 0) {
      throw std::invalid_argument(path + ":" + std::to_string(this_line) +
                                  ": invalid quantity '" + qty + "'");
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<double> daily_demand(std::span<const SalesRecord> records,
                                 const SalesCsvOptions& options) {
  std::set<std::chrono::sys_days> holidays;
  for (const std::string& h : options.holidays) {
    holidays.insert(std::chrono::sys_days{parse_date(h, options.date_format)});
  }
  std::optional<std::chrono::sys_days> from;
  std::optional<std::chrono::sys_days> to;
  if (options.date_from) {
    from = std::chrono::sys_days{parse_date(*options.date_from,
                                            options.date_format)};
  }
  if (options.date_to) {
    to = std::chrono::sys_days{parse_date(*options.date_to,
                                          options.date_format)};
  }

  std::map<std::chrono::sys_days, long long> totals;
  bool category_seen = false;
  for (const SalesRecord& r : records) {
    const std::chrono::sys_days day{r.date};
    if ((from && day < *from) || (to && day > *to)) {
      continue;
    }
    if (is_weekend(r.date) || holidays.count(day) > 0) {
      continue;
    }
    long long& total = totals[day];
    if (r.category == options.category) {
      total += r.quantity;
      category_seen = true;
    }
  }
  if (!category_seen) {
    throw std::invalid_argument("no sales recorded for category '" +
                                options.category + "'");
  }
  std::vector<double> out;
  out.reserve(totals.size());
  for (const auto& [day, total] : totals) {
    out.push_back(static_cast<double>(total));
  }
  return out;
}

DemandDistribution ingest_sales_csv(const std::string& path,
                                    const SalesCsvOptions& options) {
  const std::vector<SalesRecord> records = read_sales_csv(path, options);
  std::vector<double> days = daily_demand(records, options);
  if (options.sample_count > 0 && options.sample_count < days.size()) {
    // partial Fisher-Yates: the first sample_count slots are the draw
    RngStream rng(options.seed, 0);
    for (std::size_t i = 0; i < options.sample_count; ++i) {
      const auto j = static_cast<std::size_t>(rng.uniform_int(
          static_cast<std::int64_t>(i),
          static_cast<std::int64_t>(days.size() - 1)));
      std::swap(days[i], days[j]);
    }
    days.resize(options.sample_count);
  }
  return empirical_from_samples(days);
}

} // namespace censnv
