#include "emgfit/trial_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "emgfit/error.hpp"
#include "emgfit/format.hpp"

namespace emgfit {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_number(const std::string& text, std::size_t line_no, const char* what) {
  const std::string t = trim(text);
  if (t.empty()) throw DataError(std::string("empty ") + what + " at line " + std::to_string(line_no));
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size()) {
    throw DataError(std::string("parse error: bad ") + what + " '" + t + "' at line " +
                    std::to_string(line_no));
  }
  return v;
}

}  // namespace

LoadedRecording load_recording(const std::filesystem::path& path, TrialFormat format) {
  if (format != TrialFormat::csv) throw ConfigError("load_recording: unsupported format");
  std::ifstream in(path);
  if (!in) throw DataError("load_recording: cannot open " + path.string());

  LoadedRecording rec;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  bool rate_seen = false, channel_seen = false;
  std::map<std::string, std::string> header;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string body = trim(line.substr(1));
      const auto eq = body.find('=');
      if (eq != std::string::npos) {
        rec.extras[trim(body.substr(0, eq))] = trim(body.substr(eq + 1));
      }
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      std::istringstream ss(line);
      std::string pair;
      while (std::getline(ss, pair, ',')) {
        const auto eq = pair.find('=');
        if (eq == std::string::npos) {
          throw DataError("format error: header entry '" + trim(pair) + "' is not key=value (line " +
                          std::to_string(line_no) + ")");
        }
        header[trim(pair.substr(0, eq))] = trim(pair.substr(eq + 1));
      }
      if (!header.count("rate")) {
        throw DataError("format error: header is missing the rate declaration");
      }
      rec.series.rate = parse_number(header.at("rate"), line_no, "rate");
      if (!(rec.series.rate > 0.0)) throw DataError("format error: rate must be positive");
      rate_seen = true;
      if (header.count("channel")) {
        rec.series.channel = header.at("channel");
        channel_seen = true;
      }
      continue;
    }
    const double z = parse_number(line, line_no, "amplitude");
    if (!std::isfinite(z)) {
      throw DataError("data error: non-finite amplitude at line " + std::to_string(line_no));
    }
    rec.series.samples.push_back(z);
  }

  if (!rate_seen) throw DataError("format error: no header line in " + path.string());
  if (rec.series.samples.empty()) {
    throw DataError("data error: no amplitude rows in " + path.string());
  }

  auto defaulted = [&](const char* key) {
    rec.metadata_defaulted = true;
    rec.warnings.push_back(std::string("metadata key '") + key + "' missing, using default");
  };

  if (header.count("subject")) {
    rec.meta.subject_id = static_cast<int>(parse_number(header.at("subject"), 0, "subject"));
  } else {
    defaulted("subject");
  }
  if (header.count("experience")) {
    rec.meta.experience = parse_experience(header.at("experience"));
  } else {
    defaulted("experience");
  }
  if (header.count("weight_kg")) {
    rec.meta.weight_kg = parse_number(header.at("weight_kg"), 0, "weight_kg");
    if (rec.meta.weight_kg < 0.0) throw DataError("data error: weight_kg must be non-negative");
  } else {
    defaulted("weight_kg");
  }
  if (header.count("activity")) {
    rec.meta.activity = parse_activity(header.at("activity"));
  } else {
    defaulted("activity");
  }
  if (header.count("muscle")) {
    rec.meta.muscle = parse_muscle(header.at("muscle"));
  } else {
    defaulted("muscle");
  }
  if (header.count("trial")) {
    rec.meta.trial_index = static_cast<int>(parse_number(header.at("trial"), 0, "trial"));
  } else {
    defaulted("trial");
  }
  if (!channel_seen) {
    rec.series.channel = header.count("muscle") ? header.at("muscle") : "EMG";
    rec.warnings.push_back("header key 'channel' missing, derived from muscle");
  }
  return rec;
}

void write_recording(const std::filesystem::path& path, const SampleSeries& series,
                     const TrialMetadata& meta,
                     const std::map<std::string, std::string>& extras) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("write_recording: cannot open " + path.string());
  for (const auto& [key, value] : extras) {
    out << "# " << key << '=' << value << '\n';
  }
  out << "rate=" << format_sig(series.rate) << ",channel=" << series.channel
      << ",subject=" << meta.subject_id << ",experience=" << to_string(meta.experience)
      << ",weight_kg=" << format_sig(meta.weight_kg) << ",activity=" << to_string(meta.activity)
      << ",muscle=" << to_string(meta.muscle) << ",trial=" << meta.trial_index << '\n';
  char buf[40];
  for (double z : series.samples) {
    std::snprintf(buf, sizeof buf, "%.17g\n", z);
    out << buf;
  }
}

}  // namespace emgfit
