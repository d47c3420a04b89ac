"""lmpa: summary-based, field-sensitive pointer analysis for MiniC.

Functions are analyzed bottom-up over the call graph; each publishes a
summary of its externally visible pointer effects, replayed at call
sites. An optional model gateway refines the pipeline at four points
(behavior classification, parameter specs, summary encode/decode, kill
refinement); every model answer is validated and clamped against
conservatively computed supersets, so precision can only improve.
"""

__version__ = "0.1.0"
