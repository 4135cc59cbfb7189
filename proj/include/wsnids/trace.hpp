#pragma once

#include <cstdio>
#include <sstream>
#include <string>

#include "wsnids/types.hpp"

namespace wsnids {

// Append-only event log with a stable line format so identical runs produce
// byte-identical files. One line per event:
//   t=<ms> ev=<kind> actor=<id> [key=value ...]
class TraceLog {
 public:
  class Line {
   public:
    Line(TraceLog* log, SimTime t, const char* event, NodeId actor) : log_(log) {
      if (!log_) return;
      out_ << "t=" << t << " ev=" << event << " actor=" << actor;
    }
    ~Line() {
      if (log_) log_->append(out_.str());
    }
    Line(const Line&) = delete;
    Line& operator=(const Line&) = delete;

    Line& kv(const char* key, std::int64_t value) {
      if (log_) out_ << ' ' << key << '=' << value;
      return *this;
    }
    Line& kv(const char* key, int value) { return kv(key, static_cast<std::int64_t>(value)); }
    Line& kv(const char* key, const char* value) {
      if (log_) out_ << ' ' << key << '=' << value;
      return *this;
    }
    Line& kv(const char* key, const std::string& value) { return kv(key, value.c_str()); }
    Line& kv(const char* key, double value) {
      if (log_) {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "%.3f", value);
        out_ << ' ' << key << '=' << buf;
      }
      return *this;
    }

   private:
    TraceLog* log_;
    std::ostringstream out_;
  };

  explicit TraceLog(bool enabled = true) : enabled_(enabled) {}

  Line line(SimTime t, const char* event, NodeId actor) {
    return Line(enabled_ ? this : nullptr, t, event, actor);
  }

  const std::string& text() const { return text_; }
  std::size_t line_count() const { return lines_; }

 private:
  void append(const std::string& s) {
    text_ += s;
    text_ += '\n';
    lines_ += 1;
  }

  bool enabled_;
  std::string text_;
  std::size_t lines_ = 0;
};

}  // namespace wsnids
