#pragma once

#include <charconv>
#include <fstream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "gsphqc/errors.hpp"
#include "gsphqc/geodesy.hpp"
#include "gsphqc/spectral.hpp"

namespace gsphqc {

struct Station {
  std::string id;
  GeoPoint location;
  std::vector<double> values;  // measurement time series
};

/// Weather-station style dataset: one row per station, shared series length.
struct StationDataset {
  std::vector<Station> stations;
  Eigen::Index series_length = 0;

  Eigen::Index station_count() const {
    return static_cast<Eigen::Index>(stations.size());
  }

  std::vector<GeoPoint> points() const {
    std::vector<GeoPoint> p;
    p.reserve(stations.size());
    for (const auto& s : stations) p.push_back(s.location);
    return p;
  }

  /// Vertex-domain snapshot of all stations at time index t.
  GraphSignal snapshot(Eigen::Index t) const {
    if (t < 0 || t >= series_length) {
      throw InputError("snapshot index out of range");
    }
    Eigen::VectorXd v(station_count());
    for (Eigen::Index i = 0; i < station_count(); ++i) {
      v[i] = stations[static_cast<std::size_t>(i)]
                 .values[static_cast<std::size_t>(t)];
    }
    return vertex_signal(std::move(v));
  }
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

inline bool parse_double(std::string_view s, double& out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end;
}

}  // namespace detail

/// Load a station CSV with header `station_id,lat,lon,v1,...,vT`.
///
/// Station order follows file order. A row with empty measurement or
/// coordinate fields is dropped with a note on `warnings`; a row whose
/// field count differs from the header is a schema error, and a non-empty
/// field that does not parse as a number is a parse error. Both errors name
/// the offending line.
inline StationDataset load_station_csv(const std::string& path,
                                       std::ostream* warnings = nullptr) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset file: " + path);

  std::string line;
  if (!std::getline(in, line)) {
    throw ConfigError(path + ": empty file, header expected");
  }
  const auto header = detail::split_csv_line(line);
  if (header.size() < 4 || header[0] != "station_id" || header[1] != "lat" ||
      header[2] != "lon") {
    throw ConfigError(path +
                      ": header must be station_id,lat,lon,v1,...,vT with at "
                      "least one value column");
  }
  const std::size_t columns = header.size();
  const auto series_length = static_cast<Eigen::Index>(columns - 3);

  StationDataset ds;
  ds.series_length = series_length;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != columns) {
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": schema error: expected " + std::to_string(columns) +
                        " fields, got " + std::to_string(fields.size()));
    }
    bool has_gap = false;
    for (std::size_t i = 1; i < columns; ++i) {
      if (fields[i].empty()) {
        has_gap = true;
        break;
      }
    }
    if (has_gap) {
      if (warnings != nullptr) {
        *warnings << path << ":" << line_no << ": dropping station '"
                  << fields[0] << "' with missing values\n";
      }
      continue;
    }
    Station st;
    st.id = fields[0];
    double lat, lon;
    if (!detail::parse_double(fields[1], lat) ||
        !detail::parse_double(fields[2], lon)) {
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": parse error: bad coordinate");
    }
    st.location = GeoPoint{lat, lon};
    validate_geo_point(st.location);
    st.values.resize(static_cast<std::size_t>(series_length));
    for (Eigen::Index v = 0; v < series_length; ++v) {
      if (!detail::parse_double(fields[static_cast<std::size_t>(v) + 3],
                                st.values[static_cast<std::size_t>(v)])) {
        throw ConfigError(path + ":" + std::to_string(line_no) +
                          ": parse error: bad value in column " +
                          header[static_cast<std::size_t>(v) + 3]);
      }
    }
    ds.stations.push_back(std::move(st));
  }
  return ds;
}

}  // namespace gsphqc
