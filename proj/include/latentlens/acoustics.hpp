#ifndef LATENTLENS_ACOUSTICS_HPP
#define LATENTLENS_ACOUSTICS_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "latentlens/dsp.hpp"
#include "latentlens/errors.hpp"
#include "latentlens/format.hpp"
#include "latentlens/linalg.hpp"
#include "latentlens/wav.hpp"

namespace latentlens {

// Frame grid: 25 ms frames, 10 ms hop, shared by every extractor.
inline constexpr double kFrameLengthMs = 25.0;
inline constexpr double kHopMs = 10.0;
inline constexpr double kSilenceFloorDb = -60.0;
inline constexpr double kLogFloor = 1e-10;
inline constexpr double kPreEmphasis = 0.97;

struct FrameTrack {
  std::size_t frame_length = 0;  // samples
  std::size_t hop = 0;           // samples
  std::vector<std::vector<double>> values;  // one value or vector per frame
  std::vector<bool> voiced_flags;           // only for F0 tracks

  std::size_t size() const { return values.size(); }
};

namespace detail {

inline std::size_t frame_length_samples(unsigned rate) {
  return std::size_t(std::lround(kFrameLengthMs * 1e-3 * double(rate)));
}
inline std::size_t hop_samples(unsigned rate) {
  return std::size_t(std::lround(kHopMs * 1e-3 * double(rate)));
}

inline std::size_t frame_count(std::size_t num_samples, std::size_t frame_len,
                               std::size_t hop) {
  if (num_samples < frame_len) throw TooShort();
  return (num_samples - frame_len) / hop + 1;
}

inline std::vector<double> pre_emphasize(const std::vector<double>& x) {
  std::vector<double> y(x.size());
  if (x.empty()) return y;
  y[0] = x[0];
  for (std::size_t i = 1; i < x.size(); ++i) y[i] = x[i] - kPreEmphasis * x[i - 1];
  return y;
}

}  // namespace detail

// Per-frame F0 in Hz via normalized autocorrelation of the Hann-windowed
// frame, corrected by the window's own autocorrelation so the taper does not
// bias the peak lag. A frame is voiced iff the peak normalized
// autocorrelation is at least 0.5 and frame RMS clears the silence floor.
// Octave guard: when the lag at half the peak lag scores >= 0.9 of the peak,
// the shorter lag wins.
inline FrameTrack estimate_f0_track(const AudioBuffer& buf, double fmin_hz = 60.0,
                                    double fmax_hz = 400.0) {
  const unsigned rate = buf.sample_rate_hz;
  if (double(rate) < 2.0 * fmax_hz)
    throw UnsupportedFormat("sample rate below 2*fmax for pitch analysis");
  const std::size_t flen = detail::frame_length_samples(rate);
  const std::size_t hop = detail::hop_samples(rate);
  const std::size_t n_frames = detail::frame_count(buf.samples.size(), flen, hop);
  const std::vector<double> window = hann_window(flen);

  const std::size_t lag_min = std::size_t(std::ceil(double(rate) / fmax_hz));
  const std::size_t lag_max =
      std::min(flen - 1, std::size_t(std::floor(double(rate) / fmin_hz)));

  FrameTrack track;
  track.frame_length = flen;
  track.hop = hop;
  track.values.resize(n_frames);
  track.voiced_flags.assign(n_frames, false);

  // window autocorrelation, used to undo the taper's droop and peak shift
  std::vector<double> win_ac(lag_max + 2, 0.0);
  for (std::size_t lag = 0; lag <= lag_max + 1 && lag < flen; ++lag)
    for (std::size_t i = 0; i + lag < flen; ++i)
      win_ac[lag] += window[i] * window[i + lag];

  std::vector<double> xw(flen);
  std::vector<double> nac(lag_max + 2, 0.0);
  for (std::size_t f = 0; f < n_frames; ++f) {
    const double* x = buf.samples.data() + f * hop;
    double energy = 0.0;
    for (std::size_t i = 0; i < flen; ++i) {
      xw[i] = x[i] * window[i];
      energy += x[i] * x[i];
    }
    const double rms_db = 20.0 * std::log10(std::sqrt(energy / double(flen)) + kLogFloor);

    double ac0 = 0.0;
    for (std::size_t i = 0; i < flen; ++i) ac0 += xw[i] * xw[i];

    double best = -1.0;
    std::size_t best_lag = 0;
    for (std::size_t lag = lag_min; lag <= lag_max + 1; ++lag) {
      double ac = 0.0;
      for (std::size_t i = 0; i + lag < flen; ++i) ac += xw[i] * xw[i + lag];
      const double denom = ac0 * win_ac[lag];
      nac[lag] = denom > 0.0 ? (ac * win_ac[0]) / denom : 0.0;
      if (lag <= lag_max && nac[lag] > best) {
        best = nac[lag];
        best_lag = lag;
      }
    }

    // octave guard, generalized: the shortest local maximum scoring within
    // 0.9 of the global peak wins, so subharmonic lags (2T, 3T, ...) lose
    if (best > 0.0) {
      for (std::size_t lag = lag_min; lag < best_lag; ++lag) {
        if (nac[lag] < 0.9 * best) continue;
        if (lag > lag_min && nac[lag] < nac[lag - 1]) continue;
        if (nac[lag] < nac[lag + 1]) continue;
        best_lag = lag;
        best = nac[lag];
        break;
      }
    }

    const bool voiced = best >= 0.5 && rms_db >= kSilenceFloorDb;
    track.voiced_flags[f] = voiced;
    double f0 = 0.0;
    if (voiced) {
      double lag = double(best_lag);
      if (best_lag > lag_min && best_lag <= lag_max) {
        const double y0 = nac[best_lag - 1], y1 = nac[best_lag], y2 = nac[best_lag + 1];
        const double denom = y0 - 2.0 * y1 + y2;
        if (std::fabs(denom) > 1e-30) {
          double delta = 0.5 * (y0 - y2) / denom;
          if (delta > 0.5) delta = 0.5;
          if (delta < -0.5) delta = -0.5;
          lag += delta;
        }
      }
      f0 = double(rate) / lag;
    }
    track.values[f] = {f0};
  }
  return track;
}

// Per-frame 20*log10(RMS + eps), clipped up to the -60 dB silence floor.
inline FrameTrack frame_energy_db(const AudioBuffer& buf) {
  const std::size_t flen = detail::frame_length_samples(buf.sample_rate_hz);
  const std::size_t hop = detail::hop_samples(buf.sample_rate_hz);
  const std::size_t n_frames = detail::frame_count(buf.samples.size(), flen, hop);

  FrameTrack track;
  track.frame_length = flen;
  track.hop = hop;
  track.values.resize(n_frames);
  for (std::size_t f = 0; f < n_frames; ++f) {
    const double* x = buf.samples.data() + f * hop;
    double energy = 0.0;
    for (std::size_t i = 0; i < flen; ++i) energy += x[i] * x[i];
    const double rms = std::sqrt(energy / double(flen));
    double db = 20.0 * std::log10(rms + kLogFloor);
    if (db < kSilenceFloorDb) db = kSilenceFloorDb;
    track.values[f] = {db};
  }
  return track;
}

// Per-frame (centroid_hz, slope_db_per_octave) over the 50 Hz..Nyquist band.
// No pre-emphasis: the centroid and slope describe the signal's own spectrum.
inline FrameTrack spectral_descriptors(const AudioBuffer& buf) {
  const unsigned rate = buf.sample_rate_hz;
  const std::size_t flen = detail::frame_length_samples(rate);
  const std::size_t hop = detail::hop_samples(rate);
  const std::vector<double>& pre = buf.samples;
  const std::size_t n_frames = detail::frame_count(pre.size(), flen, hop);
  const std::vector<double> window = hann_window(flen);

  FrameTrack track;
  track.frame_length = flen;
  track.hop = hop;
  track.values.resize(n_frames);

  std::vector<double> frame(flen);
  for (std::size_t f = 0; f < n_frames; ++f) {
    for (std::size_t i = 0; i < flen; ++i) frame[i] = pre[f * hop + i] * window[i];
    std::size_t nfft = 0;
    const std::vector<double> mag = magnitude_spectrum(frame, nfft);
    const double bin_hz = double(rate) / double(nfft);

    double num = 0.0, den = 0.0;
    std::vector<double> log2f, db;
    for (std::size_t b = 0; b < mag.size(); ++b) {
      const double freq = double(b) * bin_hz;
      if (freq < 50.0 || freq > double(rate) / 2.0) continue;
      num += freq * mag[b];
      den += mag[b];
      log2f.push_back(std::log2(freq));
      db.push_back(20.0 * std::log10(mag[b] + kLogFloor));
    }
    const double centroid = den > 1e-30 ? num / den : 0.0;

    // OLS slope of dB magnitude against log2 frequency
    double slope = 0.0;
    if (log2f.size() >= 2) {
      const double mx = mean(log2f), my = mean(db);
      double sxy = 0.0, sxx = 0.0;
      for (std::size_t i = 0; i < log2f.size(); ++i) {
        sxy += (log2f[i] - mx) * (db[i] - my);
        sxx += (log2f[i] - mx) * (log2f[i] - mx);
      }
      if (sxx > 0.0) slope = sxy / sxx;
    }
    track.values[f] = {centroid, slope};
  }
  return track;
}

namespace detail {

inline double hz_to_mel(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }
inline double mel_to_hz(double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); }

// Triangular mel filterbank over FFT bins 0..nfft/2, band 0 Hz..Nyquist.
inline std::vector<std::vector<double>> mel_filterbank(std::size_t n_mels,
                                                       std::size_t nfft,
                                                       unsigned rate) {
  const double mel_max = hz_to_mel(double(rate) / 2.0);
  std::vector<double> edges(n_mels + 2);
  for (std::size_t i = 0; i < edges.size(); ++i)
    edges[i] = mel_to_hz(mel_max * double(i) / double(n_mels + 1));

  const double bin_hz = double(rate) / double(nfft);
  std::vector<std::vector<double>> bank(n_mels, std::vector<double>(nfft / 2 + 1, 0.0));
  for (std::size_t m = 0; m < n_mels; ++m) {
    const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
    for (std::size_t b = 0; b <= nfft / 2; ++b) {
      const double f = double(b) * bin_hz;
      if (f <= lo || f >= hi) continue;
      bank[m][b] = f <= mid ? (f - lo) / (mid - lo) : (hi - f) / (hi - mid);
    }
  }
  return bank;
}

}  // namespace detail

// Per-frame MFCCs c1..c13 (c0 excluded): frame-normalized power spectrum ->
// 26 triangular mel filters -> natural-log energies (floor 1e-10) ->
// orthonormal DCT-II.
inline FrameTrack mfcc_frames(const AudioBuffer& buf, std::size_t n_coeffs = 13,
                              std::size_t n_mels = 26) {
  const unsigned rate = buf.sample_rate_hz;
  if (rate < 8000) throw UnsupportedFormat("MFCC analysis requires rate >= 8000 Hz");
  const std::size_t flen = detail::frame_length_samples(rate);
  const std::size_t hop = detail::hop_samples(rate);
  const std::vector<double> pre = detail::pre_emphasize(buf.samples);
  const std::size_t n_frames = detail::frame_count(pre.size(), flen, hop);
  const std::vector<double> window = hann_window(flen);
  const std::size_t nfft = next_pow2(flen);
  const auto bank = detail::mel_filterbank(n_mels, nfft, rate);

  FrameTrack track;
  track.frame_length = flen;
  track.hop = hop;
  track.values.resize(n_frames);

  std::vector<double> frame(flen);
  for (std::size_t f = 0; f < n_frames; ++f) {
    for (std::size_t i = 0; i < flen; ++i) frame[i] = pre[f * hop + i] * window[i];
    std::size_t nfft_check = 0;
    std::vector<double> mag = magnitude_spectrum(frame, nfft_check);
    // normalize the power spectrum per frame so gain lands on the excluded
    // c0 even where the floor bites
    double total = 0.0;
    for (double m : mag) total += m * m;
    if (total > 0.0)
      for (double& m : mag) m /= std::sqrt(total);
    std::vector<double> log_energies(n_mels);
    for (std::size_t m = 0; m < n_mels; ++m) {
      double e = 0.0;
      for (std::size_t b = 0; b < mag.size(); ++b) e += bank[m][b] * mag[b] * mag[b];
      log_energies[m] = std::log(std::max(e, kLogFloor));
    }
    const std::vector<double> cepstrum = dct2_ortho(log_energies);
    std::vector<double> coeffs(n_coeffs);
    for (std::size_t c = 0; c < n_coeffs; ++c) coeffs[c] = cepstrum[c + 1];
    track.values[f] = std::move(coeffs);
  }
  return track;
}

// The fixed 23-value utterance-level feature contract.
struct FeatureVector {
  static constexpr std::size_t kCount = 23;
  static constexpr std::size_t kF0Mean = 0, kF0Std = 1, kF0Range = 2;
  static constexpr std::size_t kRmsMean = 3, kRmsStd = 4, kVoicedRatio = 5;
  static constexpr std::size_t kSyllableRate = 6, kCentroid = 7, kSlope = 8;
  static constexpr std::size_t kDuration = 9, kMfccBase = 10;

  std::array<double, kCount> values{};
  bool missing_f0 = false;

  static const std::array<std::string_view, kCount>& names() {
    static const std::array<std::string_view, kCount> n = {
        "f0_mean_hz", "f0_std_hz", "f0_range_hz", "rms_mean_db", "rms_std_db",
        "voiced_ratio", "pseudo_syllable_rate_hz", "spectral_centroid_mean_hz",
        "spectral_slope_mean_db_per_octave", "duration_s",
        "mfcc_mean_1", "mfcc_mean_2", "mfcc_mean_3", "mfcc_mean_4", "mfcc_mean_5",
        "mfcc_mean_6", "mfcc_mean_7", "mfcc_mean_8", "mfcc_mean_9", "mfcc_mean_10",
        "mfcc_mean_11", "mfcc_mean_12", "mfcc_mean_13"};
    return n;
  }

  static bool is_f0_feature(std::size_t index) { return index <= kF0Range; }
};

// Envelope peaks at least 6 dB above the silence floor and 100 ms apart.
inline std::size_t count_energy_peaks(const FrameTrack& energy) {
  const double threshold = kSilenceFloorDb + 6.0;
  const std::size_t min_gap = std::size_t(std::lround(100.0 / kHopMs));
  std::size_t count = 0;
  long last_peak = -long(min_gap) - 1;
  const std::size_t n = energy.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double e = energy.values[i][0];
    if (e < threshold) continue;
    const double prev = i > 0 ? energy.values[i - 1][0] : -std::numeric_limits<double>::infinity();
    const double next = i + 1 < n ? energy.values[i + 1][0] : -std::numeric_limits<double>::infinity();
    if (e < prev || e < next) continue;
    if (long(i) - last_peak < long(min_gap)) continue;
    ++count;
    last_peak = long(i);
  }
  return count;
}

inline FeatureVector aggregate_features(const AudioBuffer& buf) {
  const FrameTrack f0 = estimate_f0_track(buf);
  const FrameTrack energy = frame_energy_db(buf);
  const FrameTrack spectral = spectral_descriptors(buf);
  const FrameTrack mfcc = mfcc_frames(buf);

  FeatureVector fv;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  std::vector<double> voiced_f0;
  for (std::size_t i = 0; i < f0.size(); ++i)
    if (f0.voiced_flags[i]) voiced_f0.push_back(f0.values[i][0]);
  if (voiced_f0.empty()) {
    fv.missing_f0 = true;
    fv.values[FeatureVector::kF0Mean] = nan;
    fv.values[FeatureVector::kF0Std] = nan;
    fv.values[FeatureVector::kF0Range] = nan;
  } else {
    fv.values[FeatureVector::kF0Mean] = mean(voiced_f0);
    fv.values[FeatureVector::kF0Std] = stddev(voiced_f0);
    double lo = voiced_f0[0], hi = voiced_f0[0];
    for (double v : voiced_f0) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    fv.values[FeatureVector::kF0Range] = hi - lo;
  }
  fv.values[FeatureVector::kVoicedRatio] =
      double(voiced_f0.size()) / double(f0.size());

  std::vector<double> db;
  for (const auto& v : energy.values) db.push_back(v[0]);
  fv.values[FeatureVector::kRmsMean] = mean(db);
  fv.values[FeatureVector::kRmsStd] = stddev(db);

  fv.values[FeatureVector::kDuration] = buf.duration_s();
  fv.values[FeatureVector::kSyllableRate] =
      double(count_energy_peaks(energy)) / buf.duration_s();

  std::vector<double> centroid, slope;
  for (const auto& v : spectral.values) {
    centroid.push_back(v[0]);
    slope.push_back(v[1]);
  }
  fv.values[FeatureVector::kCentroid] = mean(centroid);
  fv.values[FeatureVector::kSlope] = mean(slope);

  for (std::size_t c = 0; c < 13; ++c) {
    std::vector<double> col;
    for (const auto& v : mfcc.values) col.push_back(v[c]);
    fv.values[FeatureVector::kMfccBase + c] = mean(col);
  }
  return fv;
}

// --- feature CSV, the `features` subcommand's output contract ---

inline std::string feature_csv_header() {
  std::vector<std::string> cells = {"id"};
  for (auto name : FeatureVector::names()) cells.emplace_back(name);
  cells.emplace_back("missing_f0");
  return join_csv(cells);
}

inline std::string feature_csv_row(const std::string& id, const FeatureVector& fv) {
  std::vector<std::string> cells = {id};
  for (std::size_t i = 0; i < FeatureVector::kCount; ++i) {
    if (fv.missing_f0 && FeatureVector::is_f0_feature(i))
      cells.emplace_back("");
    else
      cells.push_back(format_double(fv.values[i]));
  }
  cells.emplace_back(fv.missing_f0 ? "true" : "false");
  return join_csv(cells);
}

inline std::map<std::string, FeatureVector> read_feature_csv(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty feature CSV");
  if (split_csv_line(line).size() != FeatureVector::kCount + 2)
    throw ParseError("unexpected feature CSV header: " + line);
  std::map<std::string, FeatureVector> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != FeatureVector::kCount + 2)
      throw ParseError(line_no, "wrong cell count");
    FeatureVector fv;
    fv.missing_f0 = cells.back() == "true";
    for (std::size_t i = 0; i < FeatureVector::kCount; ++i) {
      const std::string& cell = cells[i + 1];
      if (cell.empty()) {
        if (!fv.missing_f0 || !FeatureVector::is_f0_feature(i))
          throw ParseError(line_no, "unexpected empty cell");
        fv.values[i] = std::numeric_limits<double>::quiet_NaN();
      } else {
        fv.values[i] = std::stod(cell);
      }
    }
    if (out.count(cells[0])) throw DuplicateId(cells[0]);
    out.emplace(cells[0], fv);
  }
  return out;
}

}  // namespace latentlens

#endif
