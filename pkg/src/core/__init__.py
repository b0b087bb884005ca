"""Physics models, synthetic experiments and the analysis chain"""
