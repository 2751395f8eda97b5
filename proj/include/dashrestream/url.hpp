/*
 * Copyright 2026 The dashrestream Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef DASHRESTREAM_URL_HPP
#define DASHRESTREAM_URL_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dashrestream/strings.hpp"

namespace dashrestream::url {

struct Url {
  std::string scheme;  // "http" or "https"
  std::string host;
  int port = 0;
  std::string target;  // path + query, always starts with '/'

  std::string origin() const {
    return scheme + "://" + host + ":" + std::to_string(port);
  }
};

inline bool HasScheme(std::string_view s) {
  auto pos = s.find("://");
  if (pos == std::string_view::npos || pos == 0) return false;
  for (char c : s.substr(0, pos))
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' ||
          c == '.'))
      return false;
  return true;
}

inline bool IsHttp(std::string_view s) {
  auto lower = strings::ToLower(s.substr(0, 8));
  return strings::StartsWith(lower, "http://") ||
         strings::StartsWith(lower, "https://");
}

inline std::optional<Url> Parse(std::string_view s) {
  if (!IsHttp(s)) return std::nullopt;
  Url u;
  auto scheme_end = s.find("://");
  u.scheme = strings::ToLower(s.substr(0, scheme_end));
  auto rest = s.substr(scheme_end + 3);
  auto slash = rest.find('/');
  auto authority = rest.substr(0, slash);
  u.target = slash == std::string_view::npos ? "/" : std::string(rest.substr(slash));
  if (auto at = authority.rfind('@'); at != std::string_view::npos)
    authority = authority.substr(at + 1);
  auto colon = authority.rfind(':');
  if (colon != std::string_view::npos && authority.find(']') == std::string_view::npos) {
    auto port = strings::ParseInt(authority.substr(colon + 1));
    if (!port || *port <= 0 || *port > 65535) return std::nullopt;
    u.port = static_cast<int>(*port);
    u.host = std::string(authority.substr(0, colon));
  } else {
    u.host = std::string(authority);
    u.port = u.scheme == "https" ? 443 : 80;
  }
  if (u.host.empty()) return std::nullopt;
  return u;
}

inline std::string RemoveDotSegments(std::string_view path) {
  const bool absolute = !path.empty() && path.front() == '/';
  const bool trailing = !path.empty() && path.back() == '/';
  std::vector<std::string_view> out;
  for (auto seg : strings::Split(path, '/')) {
    if (seg.empty() || seg == ".") continue;
    if (seg == "..") {
      if (!out.empty() && out.back() != "..") {
        out.pop_back();
      } else if (!absolute) {
        out.push_back(seg);
      }
      continue;
    }
    out.push_back(seg);
  }
  std::string result = absolute ? "/" : "";
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (i) result += '/';
    result += out[i];
  }
  if (trailing && !out.empty()) result += '/';
  if (result.empty()) result = absolute ? "/" : ".";
  return result;
}

/// Resolves `ref` against `base` with URL semantics. `base` may be an
/// http(s) URL or a filesystem path; a base ending in '/' is a directory,
/// otherwise its last component is replaced.
inline std::string Resolve(std::string_view base, std::string_view ref) {
  ref = strings::Trim(ref);
  if (HasScheme(ref) || base.empty()) return std::string(ref);
  if (auto u = Parse(base)) {
    std::string path = u->target;
    if (auto q = path.find('?'); q != std::string::npos) path.resize(q);
    std::string merged;
    if (!ref.empty() && ref.front() == '/') {
      merged = std::string(ref);
    } else {
      merged = path.substr(0, path.rfind('/') + 1) + std::string(ref);
    }
    auto query = merged.find('?');
    std::string tail = query == std::string::npos ? "" : merged.substr(query);
    if (query != std::string::npos) merged.resize(query);
    std::string authority = u->host;
    const bool default_port = (u->scheme == "http" && u->port == 80) ||
                              (u->scheme == "https" && u->port == 443);
    if (!default_port) authority += ":" + std::to_string(u->port);
    return u->scheme + "://" + authority + RemoveDotSegments(merged) + tail;
  }
  if (!ref.empty() && ref.front() == '/') return RemoveDotSegments(ref);
  std::string dir(base.substr(0, base.rfind('/') + 1));
  return RemoveDotSegments(dir + std::string(ref));
}

}  // namespace dashrestream::url

#endif  // DASHRESTREAM_URL_HPP
