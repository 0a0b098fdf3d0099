"""Open-set multi-label tagging at desk scale.

Two-tier tag taxonomy (six fixed categories plus user open tags), a trainable
attention head scoring label-embedding queries against fused visual/textual
features, an open-set negative-sampling training loop, and a multi-label
evaluation harness. Frozen encoders live behind embedding providers; nothing
here runs a neural network besides the head itself.
"""

__version__ = "0.1.0"
