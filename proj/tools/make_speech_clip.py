#!/usr/bin/env python3
# Copyright 2026 The bbfm Authors. All rights reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Rebuilds tests/data/speech_8k.s16 from the LibriVox excerpts shipped in the
pocketsphinx 5.1.1 source distribution (test/data/librivox).

The recordings are public domain (LibriVox, "Sense and Sensibility", ch. 1).
Utterances 0880 and 0930 are resampled 16 kHz -> 8 kHz, concatenated without
padding and peak-normalized to 32000.

    pip download pocketsphinx==5.1.1 --no-deps --no-binary :all: -d /tmp/ps
    tar xzf /tmp/ps/pocketsphinx-5.1.1.tar.gz -C /tmp/ps
    python3 tools/make_speech_clip.py /tmp/ps/pocketsphinx-5.1.1/test/data/librivox
"""

import pathlib
import sys

import numpy as np
import scipy.io.wavfile
import scipy.signal

UTTERANCES = ("0880", "0930")


def main() -> int:
    src = pathlib.Path(sys.argv[1])
    out = pathlib.Path(__file__).resolve().parent.parent / "tests" / "data" / "speech_8k.s16"
    parts = []
    for utt in UTTERANCES:
        rate, x = scipy.io.wavfile.read(src / f"sense_and_sensibility_01_austen_64kb-{utt}.wav")
        assert rate == 16000
        parts.append(scipy.signal.resample_poly(x.astype(np.float64), 1, 2))
    x = np.concatenate(parts)
    x = np.round(x / np.max(np.abs(x)) * 32000.0).astype("<i2")
    x.tofile(out)
    print(f"wrote {out} ({len(x)} samples, {len(x) / 8000.0:.2f} s)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
