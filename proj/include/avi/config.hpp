#pragma once

#include <map>
#include <string>
#include <vector>

namespace avi {

// Plain-text key/value configuration with [section] headers. Keys are stored
// as "section.key"; '#' starts a comment. Later assignments win, so layering
// a file under CLI overrides is a sequence of set() calls.
class KeyValueConfig {
  public:
    static KeyValueConfig from_file(const std::string& path);
    static KeyValueConfig from_string(const std::string& text);

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long get_long(const std::string& key, long fallback) const;
    int get_int(const std::string& key, int fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<uint64_t> get_seed_list(const std::string& key,
                                        const std::vector<uint64_t>& fallback) const;

    std::string to_text() const;  // stable key order

  private:
    std::map<std::string, std::string> values_;
};

}  // namespace avi
