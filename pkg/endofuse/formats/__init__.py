"""Readers and writers for point clouds, meshes, images and camera files."""
