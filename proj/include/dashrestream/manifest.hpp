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

// DASH MPD parsing (full profile, static, single period) and the encoding
// ladder model used to join log bitrates to representations.

#ifndef DASHRESTREAM_MANIFEST_HPP
#define DASHRESTREAM_MANIFEST_HPP

#include <expat.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "dashrestream/errors.hpp"
#include "dashrestream/log_io.hpp"
#include "dashrestream/strings.hpp"
#include "dashrestream/url.hpp"

namespace dashrestream {

struct Resolution {
  int width = 0;
  int height = 0;

  long long area() const { return static_cast<long long>(width) * height; }
  std::string ToString() const {
    return std::to_string(width) + "x" + std::to_string(height);
  }
  bool operator==(const Resolution&) const = default;
};

/// Parses "WxH".
inline std::optional<Resolution> ParseResolution(std::string_view text) {
  text = strings::Trim(text);
  auto x = text.find_first_of("xX");
  if (x == std::string_view::npos) return std::nullopt;
  auto w = strings::ParseInt(text.substr(0, x));
  auto h = strings::ParseInt(text.substr(x + 1));
  if (!w || !h || *w <= 0 || *h <= 0) return std::nullopt;
  return Resolution{static_cast<int>(*w), static_cast<int>(*h)};
}

enum class MediaKind { kVideo, kAudio };

struct Representation {
  std::string id;
  Kbps bitrate = 0;
  int width = 0;
  int height = 0;
  MediaKind media_kind = MediaKind::kVideo;

  Resolution resolution() const { return {width, height}; }
  bool operator==(const Representation&) const = default;
};

/// Video representations in strictly ascending bitrate order.
class Ladder {
 public:
  Ladder() = default;

  explicit Ladder(std::vector<Representation> reps)
      : reps_(std::move(reps)) {
    std::stable_sort(reps_.begin(), reps_.end(),
                     [](const auto& a, const auto& b) { return a.bitrate < b.bitrate; });
    for (std::size_t i = 0; i < reps_.size(); ++i) {
      const auto& r = reps_[i];
      if (r.bitrate <= 0)
        throw ManifestError("representation '" + r.id +
                            "' has non-positive bitrate");
      if (r.media_kind == MediaKind::kVideo && (r.width <= 0 || r.height <= 0))
        throw ManifestError("video representation '" + r.id +
                            "' lacks a resolution");
      if (i == 0) continue;
      const auto& p = reps_[i - 1];
      if (p.bitrate == r.bitrate)
        throw ManifestError("representations '" + p.id + "' and '" + r.id +
                            "' share bitrate " + std::to_string(r.bitrate) +
                            " kbps");
      if (r.resolution().area() < p.resolution().area())
        throw ManifestError("ladder resolution decreases from " +
                            p.resolution().ToString() + " to " +
                            r.resolution().ToString() + " at " +
                            std::to_string(r.bitrate) + " kbps");
    }
  }

  const std::vector<Representation>& representations() const { return reps_; }
  std::size_t size() const { return reps_.size(); }
  bool empty() const { return reps_.empty(); }
  const Representation& lowest() const { return reps_.front(); }
  const Representation& highest() const { return reps_.back(); }

  const Representation* find(Kbps kbps) const {
    auto it = std::lower_bound(
        reps_.begin(), reps_.end(), kbps,
        [](const Representation& r, Kbps v) { return r.bitrate < v; });
    if (it == reps_.end() || it->bitrate != kbps) return nullptr;
    return &*it;
  }

  bool contains(Kbps kbps) const { return find(kbps) != nullptr; }

  bool operator==(const Ladder&) const = default;

 private:
  std::vector<Representation> reps_;
};

/// The thirteen-rung H.264 ladder (235 kbps to 40 Mbps over eight
/// resolutions) of the public 4K multi-codec DASH dataset.
inline Ladder DatasetLadder() {
  struct Rung {
    Kbps kbps;
    int w, h;
  };
  static constexpr Rung kRungs[] = {
      {235, 320, 146},     {375, 384, 174},     {560, 512, 234},
      {750, 512, 234},     {1050, 640, 292},    {1750, 720, 328},
      {2350, 1280, 582},   {3000, 1280, 582},   {3850, 1920, 1080},
      {4300, 1920, 1080},  {15000, 3840, 2160}, {25000, 3840, 2160},
      {40000, 3840, 2160},
  };
  std::vector<Representation> reps;
  for (const auto& r : kRungs)
    reps.push_back({std::to_string(r.kbps) + "kbps", r.kbps, r.w, r.h,
                    MediaKind::kVideo});
  return Ladder(std::move(reps));
}

struct ManifestIndex {
  std::map<std::string, std::vector<std::string>> video_urls;
  std::map<std::string, std::vector<std::string>> audio_urls;
  std::map<std::string, std::string> init_urls;
  std::vector<Representation> audio_representations;
  /// Highest-bitrate audio representation, when the manifest has audio.
  std::optional<std::string> selected_audio;
  double segment_duration_ms = 0;
  long long start_number = 1;

  bool operator==(const ManifestIndex&) const = default;
};

struct Manifest {
  Ladder ladder;
  ManifestIndex index;

  bool operator==(const Manifest&) const = default;
};

/// Bits-per-second to kbps, rounded to the nearest integer.
inline Kbps NormalizeToKbps(double bps) {
  return static_cast<Kbps>(std::llround(bps / 1000.0));
}

/// Parses an ISO 8601 duration ("PT1M30.5S", "P1DT2H") to milliseconds.
inline std::optional<double> ParseIsoDuration(std::string_view text) {
  text = strings::Trim(text);
  if (text.empty() || (text.front() != 'P' && text.front() != 'p'))
    return std::nullopt;
  text.remove_prefix(1);
  double total_s = 0;
  bool in_time = false;
  bool any = false;
  while (!text.empty()) {
    if (text.front() == 'T' || text.front() == 't') {
      in_time = true;
      text.remove_prefix(1);
      continue;
    }
    std::size_t n = 0;
    while (n < text.size() &&
           (std::isdigit(static_cast<unsigned char>(text[n])) || text[n] == '.'))
      ++n;
    if (n == 0 || n == text.size()) return std::nullopt;
    auto value = strings::ParseDouble(text.substr(0, n));
    if (!value) return std::nullopt;
    char unit = static_cast<char>(std::toupper(static_cast<unsigned char>(text[n])));
    double scale = 0;
    if (!in_time && unit == 'Y') scale = 365.0 * 86400;
    else if (!in_time && unit == 'M') scale = 30.0 * 86400;
    else if (!in_time && unit == 'W') scale = 7.0 * 86400;
    else if (!in_time && unit == 'D') scale = 86400;
    else if (in_time && unit == 'H') scale = 3600;
    else if (in_time && unit == 'M') scale = 60;
    else if (in_time && unit == 'S') scale = 1;
    else return std::nullopt;
    total_s += *value * scale;
    any = true;
    text.remove_prefix(n + 1);
  }
  if (!any) return std::nullopt;
  return total_s * 1000.0;
}

namespace detail {

struct XmlElement {
  std::string name;  // local name, namespace prefix stripped
  std::map<std::string, std::string> attributes;
  std::vector<std::unique_ptr<XmlElement>> children;
  std::string text;

  const std::string* attr(const std::string& key) const {
    auto it = attributes.find(key);
    return it == attributes.end() ? nullptr : &it->second;
  }
  const XmlElement* child(std::string_view n) const {
    for (const auto& c : children)
      if (c->name == n) return c.get();
    return nullptr;
  }
  std::vector<const XmlElement*> all(std::string_view n) const {
    std::vector<const XmlElement*> out;
    for (const auto& c : children)
      if (c->name == n) out.push_back(c.get());
    return out;
  }
};

inline std::string LocalName(const char* qualified) {
  std::string_view n(qualified);
  // Expat namespace mode joins "uri|local"; plain mode leaves "prefix:local".
  if (auto bar = n.rfind('|'); bar != std::string_view::npos) n = n.substr(bar + 1);
  if (auto colon = n.rfind(':'); colon != std::string_view::npos)
    n = n.substr(colon + 1);
  return std::string(n);
}

class XmlTreeBuilder {
 public:
  std::unique_ptr<XmlElement> Parse(std::string_view document) {
    std::unique_ptr<XML_ParserStruct, decltype(&XML_ParserFree)> parser(
        XML_ParserCreateNS(nullptr, '|'), &XML_ParserFree);
    if (!parser) throw ManifestError("cannot allocate XML parser");
    XML_SetUserData(parser.get(), this);
    XML_SetElementHandler(parser.get(), &OnStart, &OnEnd);
    XML_SetCharacterDataHandler(parser.get(), &OnText);
    if (XML_Parse(parser.get(), document.data(), static_cast<int>(document.size()),
                  XML_TRUE) == XML_STATUS_ERROR) {
      throw ManifestError(
          std::string("malformed manifest XML at line ") +
          std::to_string(XML_GetCurrentLineNumber(parser.get())) + ": " +
          XML_ErrorString(XML_GetErrorCode(parser.get())));
    }
    if (!root_) throw ManifestError("manifest has no root element");
    return std::move(root_);
  }

 private:
  static void OnStart(void* data, const XML_Char* name, const XML_Char** attrs) {
    auto* self = static_cast<XmlTreeBuilder*>(data);
    auto element = std::make_unique<XmlElement>();
    element->name = LocalName(name);
    for (int i = 0; attrs[i]; i += 2)
      element->attributes[LocalName(attrs[i])] = attrs[i + 1];
    XmlElement* raw = element.get();
    if (self->stack_.empty()) {
      self->root_ = std::move(element);
    } else {
      self->stack_.back()->children.push_back(std::move(element));
    }
    self->stack_.push_back(raw);
  }
  static void OnEnd(void* data, const XML_Char*) {
    static_cast<XmlTreeBuilder*>(data)->stack_.pop_back();
  }
  static void OnText(void* data, const XML_Char* s, int len) {
    auto* self = static_cast<XmlTreeBuilder*>(data);
    if (!self->stack_.empty()) self->stack_.back()->text.append(s, len);
  }

  std::unique_ptr<XmlElement> root_;
  std::vector<XmlElement*> stack_;
};

/// Merged view of SegmentTemplate attributes down the hierarchy.
struct TemplateAttrs {
  std::optional<std::string> media, initialization;
  std::optional<double> timescale, duration;
  std::optional<long long> start_number;
  const XmlElement* timeline = nullptr;

  void Overlay(const XmlElement& e) {
    if (auto* v = e.attr("media")) media = *v;
    if (auto* v = e.attr("initialization")) initialization = *v;
    if (auto* v = e.attr("timescale")) timescale = strings::ParseDouble(*v);
    if (auto* v = e.attr("duration")) duration = strings::ParseDouble(*v);
    if (auto* v = e.attr("startNumber")) start_number = strings::ParseInt(*v);
    if (auto* t = e.child("SegmentTimeline")) timeline = t;
  }
};

/// Expands $RepresentationID$, $Number$, $Bandwidth$, $Time$ (with optional
/// %0Nd width) and $$.
inline std::string ExpandTemplate(std::string_view tmpl, const std::string& rep_id,
                                  long long bandwidth_bps, long long number,
                                  long long time) {
  std::string out;
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] != '$') {
      out += tmpl[i++];
      continue;
    }
    auto end = tmpl.find('$', i + 1);
    if (end == std::string_view::npos)
      throw ManifestError("unterminated identifier in template '" +
                          std::string(tmpl) + "'");
    std::string_view ident = tmpl.substr(i + 1, end - i - 1);
    i = end + 1;
    if (ident.empty()) {
      out += '$';
      continue;
    }
    std::string_view format;
    if (auto pct = ident.find('%'); pct != std::string_view::npos) {
      format = ident.substr(pct);
      ident = ident.substr(0, pct);
    }
    auto number_text = [&](long long v) {
      if (format.empty()) return std::to_string(v);
      // Only %0<width>d is legal in DASH templates.
      if (format.size() < 3 || format[1] != '0' || format.back() != 'd')
        throw ManifestError("unsupported template format '" + std::string(format) + "'");
      auto width = strings::ParseInt(format.substr(2, format.size() - 3));
      if (!width) throw ManifestError("bad template width '" + std::string(format) + "'");
      std::string digits = std::to_string(v);
      if (static_cast<long long>(digits.size()) < *width)
        digits.insert(0, static_cast<std::size_t>(*width) - digits.size(), '0');
      return digits;
    };
    if (ident == "RepresentationID") out += rep_id;
    else if (ident == "Number") out += number_text(number);
    else if (ident == "Bandwidth") out += number_text(bandwidth_bps);
    else if (ident == "Time") out += number_text(time);
    else
      throw ManifestError("unknown template identifier '$" + std::string(ident) + "$'");
  }
  return out;
}

inline bool HasByteRange(const XmlElement& e) {
  if (e.name == "SegmentBase") return true;
  if (e.attr("mediaRange") || e.attr("indexRange")) return true;
  if (e.name == "Initialization" && e.attr("range")) return true;
  return false;
}

inline void RejectByteRange(const XmlElement* e, const std::string& where) {
  if (!e) return;
  if (e->child("SegmentBase"))
    throw UnsupportedError("byte-range addressing (SegmentBase) in " + where);
  if (auto* list = e->child("SegmentList")) {
    for (const auto& c : list->children)
      if (HasByteRange(*c))
        throw UnsupportedError("byte-range addressing (SegmentList ranges) in " + where);
  }
  if (auto* tmpl = e->child("SegmentTemplate"); tmpl && tmpl->attr("indexRange"))
    throw UnsupportedError("byte-range addressing (indexRange) in " + where);
}

inline std::string BaseUrlOf(const XmlElement* e, const std::string& parent) {
  if (!e) return parent;
  if (auto* b = e->child("BaseURL")) return url::Resolve(parent, strings::Trim(b->text));
  return parent;
}

inline std::optional<MediaKind> KindOf(const XmlElement& as, const XmlElement& rep) {
  auto classify = [](const std::string* s) -> std::optional<MediaKind> {
    if (!s) return std::nullopt;
    if (strings::StartsWith(*s, "video")) return MediaKind::kVideo;
    if (strings::StartsWith(*s, "audio")) return MediaKind::kAudio;
    return std::nullopt;
  };
  if (auto k = classify(rep.attr("contentType"))) return k;
  if (auto k = classify(rep.attr("mimeType"))) return k;
  if (auto k = classify(as.attr("contentType"))) return k;
  if (auto k = classify(as.attr("mimeType"))) return k;
  if (rep.attr("width") || as.attr("width")) return MediaKind::kVideo;
  return std::nullopt;
}

}  // namespace detail

inline constexpr std::string_view kFullProfile = "urn:mpeg:dash:profile:full:2011";

/// Parses an MPD document. `location` is the manifest's own URL or path and
/// anchors relative segment addresses.
inline Manifest ParseManifest(std::string_view document,
                              const std::string& location = "") {
  auto root = detail::XmlTreeBuilder().Parse(document);
  if (root->name != "MPD") throw ManifestError("root element is not MPD");

  const std::string* profiles = root->attr("profiles");
  bool full = false;
  if (profiles)
    for (auto p : strings::Split(*profiles, ','))
      if (strings::Trim(p) == kFullProfile) full = true;
  if (!full)
    throw UnsupportedError("manifest profile '" + (profiles ? *profiles : "") +
                           "' (only the full profile is supported)");
  if (auto* type = root->attr("type"); type && *type == "dynamic")
    throw UnsupportedError("dynamic (live) manifests");

  auto periods = root->all("Period");
  if (periods.size() != 1)
    throw UnsupportedError("manifest with " + std::to_string(periods.size()) +
                           " periods (exactly one required)");
  const detail::XmlElement& period = *periods.front();

  std::optional<double> total_ms;
  if (auto* d = period.attr("duration")) total_ms = ParseIsoDuration(*d);
  if (!total_ms)
    if (auto* d = root->attr("mediaPresentationDuration")) total_ms = ParseIsoDuration(*d);

  const std::string mpd_base = detail::BaseUrlOf(root.get(), location);
  const std::string period_base = detail::BaseUrlOf(&period, mpd_base);

  std::vector<Representation> video;
  Manifest result;
  auto& index = result.index;
  std::optional<double> segment_ms;
  std::optional<long long> start_number;

  for (const auto* as : period.all("AdaptationSet")) {
    const std::string as_base = detail::BaseUrlOf(as, period_base);
    for (const auto* rep : as->all("Representation")) {
      auto kind = detail::KindOf(*as, *rep);
      if (!kind) continue;  // text tracks and other media are not streamed
      const std::string* id = rep->attr("id");
      if (!id || id->empty())
        throw ManifestError("representation without id");
      const std::string where = "representation '" + *id + "'";
      detail::RejectByteRange(&period, where);
      detail::RejectByteRange(as, where);
      detail::RejectByteRange(rep, where);

      const std::string* bw = rep->attr("bandwidth");
      auto bps = bw ? strings::ParseDouble(*bw) : std::nullopt;
      if (!bps || *bps <= 0) throw ManifestError(where + " has no valid bandwidth");

      Representation r;
      r.id = *id;
      r.bitrate = NormalizeToKbps(*bps);
      r.media_kind = *kind;
      auto dim = [&](const char* key) {
        const std::string* v = rep->attr(key);
        if (!v) v = as->attr(key);
        auto n = v ? strings::ParseInt(*v) : std::nullopt;
        return n ? static_cast<int>(*n) : 0;
      };
      r.width = dim("width");
      r.height = dim("height");

      const std::string rep_base = detail::BaseUrlOf(rep, as_base);
      const long long bw_bps = std::llround(*bps);

      std::vector<std::string> urls;
      std::string init_url;
      double seg_ms = 0;
      long long first_number = 1;

      const detail::XmlElement* list = rep->child("SegmentList");
      if (!list) list = as->child("SegmentList");
      if (!list) list = period.child("SegmentList");

      if (list) {
        double timescale = 1;
        if (auto* v = list->attr("timescale")) timescale = strings::ParseDouble(*v).value_or(1);
        if (auto* v = list->attr("duration"))
          seg_ms = strings::ParseDouble(*v).value_or(0) / timescale * 1000.0;
        if (auto* v = list->attr("startNumber")) first_number = strings::ParseInt(*v).value_or(1);
        if (auto* init = list->child("Initialization")) {
          if (auto* src = init->attr("sourceURL")) init_url = url::Resolve(rep_base, *src);
        }
        for (const auto* s : list->all("SegmentURL")) {
          const std::string* media = s->attr("media");
          if (!media) throw UnsupportedError("SegmentURL without media in " + where);
          urls.push_back(url::Resolve(rep_base, *media));
        }
      } else {
        detail::TemplateAttrs t;
        if (auto* e = period.child("SegmentTemplate")) t.Overlay(*e);
        if (auto* e = as->child("SegmentTemplate")) t.Overlay(*e);
        if (auto* e = rep->child("SegmentTemplate")) t.Overlay(*e);
        if (!t.media)
          throw UnsupportedError("no per-segment addressing for " + where);
        const double timescale = t.timescale.value_or(1);
        first_number = t.start_number.value_or(1);
        if (t.initialization)
          init_url = url::Resolve(
              rep_base, detail::ExpandTemplate(*t.initialization, r.id, bw_bps, 0, 0));
        if (t.timeline) {
          long long number = first_number;
          long long time = 0;
          bool first = true;
          for (const auto* s : t.timeline->all("S")) {
            auto d = s->attr("d") ? strings::ParseInt(*s->attr("d")) : std::nullopt;
            if (!d || *d <= 0) throw ManifestError("SegmentTimeline entry without d in " + where);
            if (auto* tv = s->attr("t")) time = strings::ParseInt(*tv).value_or(time);
            long long repeat = s->attr("r") ? strings::ParseInt(*s->attr("r")).value_or(0) : 0;
            if (repeat < 0)
              throw UnsupportedError("open-ended SegmentTimeline repeat in " + where);
            if (first) {
              seg_ms = static_cast<double>(*d) / timescale * 1000.0;
              first = false;
            }
            for (long long k = 0; k <= repeat; ++k) {
              urls.push_back(url::Resolve(
                  rep_base, detail::ExpandTemplate(*t.media, r.id, bw_bps, number, time)));
              ++number;
              time += *d;
            }
          }
        } else {
          if (!t.duration || *t.duration <= 0)
            throw ManifestError("SegmentTemplate without duration in " + where);
          if (!total_ms)
            throw ManifestError("manifest declares no presentation duration");
          seg_ms = *t.duration / timescale * 1000.0;
          // A trailing fragment shorter than 0.1% of a segment is rounding noise.
          const long long count =
              static_cast<long long>(std::ceil(*total_ms / seg_ms - 1e-3));
          for (long long k = 0; k < count; ++k)
            urls.push_back(url::Resolve(
                rep_base, detail::ExpandTemplate(*t.media, r.id, bw_bps,
                                                 first_number + k, 0)));
        }
      }
      if (urls.empty()) throw ManifestError(where + " lists no segments");
      if (init_url.empty()) throw ManifestError(where + " has no initialization segment");

      if (*kind == MediaKind::kVideo) {
        if (segment_ms && std::fabs(*segment_ms - seg_ms) > 0.5)
          throw UnsupportedError("video representations with differing segment durations");
        segment_ms = seg_ms;
        start_number = first_number;
        if (index.video_urls.count(r.id))
          throw ManifestError("duplicate representation id '" + r.id + "'");
        index.video_urls[r.id] = std::move(urls);
        video.push_back(r);
      } else {
        if (index.audio_urls.count(r.id) || index.video_urls.count(r.id))
          throw ManifestError("duplicate representation id '" + r.id + "'");
        index.audio_urls[r.id] = std::move(urls);
        index.audio_representations.push_back(r);
      }
      index.init_urls[r.id] = init_url;
    }
  }

  if (video.empty()) throw ManifestError("manifest has no video representations");

  auto equal_lengths = [](const auto& lists, const char* kind) {
    std::optional<std::size_t> n;
    for (const auto& [id, urls] : lists) {
      if (n && *n != urls.size())
        throw ManifestError(std::string(kind) +
                            " representations list differing segment counts");
      n = urls.size();
    }
  };
  equal_lengths(index.video_urls, "video");
  equal_lengths(index.audio_urls, "audio");

  std::sort(index.audio_representations.begin(), index.audio_representations.end(),
            [](const auto& a, const auto& b) { return a.bitrate < b.bitrate; });
  if (!index.audio_representations.empty())
    index.selected_audio = index.audio_representations.back().id;
  index.segment_duration_ms = segment_ms.value_or(0);
  index.start_number = start_number.value_or(1);
  result.ladder = Ladder(std::move(video));
  return result;
}

inline const Representation& ResolveRepresentation(const Ladder& ladder, Kbps rep_level) {
  if (const auto* r = ladder.find(rep_level)) return *r;
  const auto& reps = ladder.representations();
  std::string nearest;
  auto above = std::lower_bound(
      reps.begin(), reps.end(), rep_level,
      [](const Representation& r, Kbps v) { return r.bitrate < v; });
  if (above != reps.begin()) nearest += std::to_string(std::prev(above)->bitrate) + " kbps";
  if (above != reps.end()) {
    if (!nearest.empty()) nearest += ", ";
    nearest += std::to_string(above->bitrate) + " kbps";
  }
  throw UnknownBitrateError(rep_level, "bitrate " + std::to_string(rep_level) +
                                           " kbps is not in the ladder (nearest: " +
                                           nearest + ")");
}

/// Throws UnknownBitrateError for the first record whose rep level is not a
/// ladder bitrate.
inline void ValidateAgainstLadder(const VideoLog& log, const Ladder& ladder) {
  for (const auto& r : log.records()) ResolveRepresentation(ladder, r.rep_level);
}

/// Largest-area resolution used anywhere in the log; ties go to the wider one.
inline Resolution HighestResolution(const VideoLog& log, const Ladder& ladder) {
  Resolution best;
  for (const auto& r : log.records()) {
    Resolution res = ResolveRepresentation(ladder, r.rep_level).resolution();
    if (res.area() > best.area() ||
        (res.area() == best.area() && res.width > best.width))
      best = res;
  }
  return best;
}

}  // namespace dashrestream

#endif  // DASHRESTREAM_MANIFEST_HPP
