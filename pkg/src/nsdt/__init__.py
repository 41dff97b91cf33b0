# nsdt package
